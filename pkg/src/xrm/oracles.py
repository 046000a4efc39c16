"""Independent reference solvers used by tests to cross-check the trainer.

Nothing here shares formulas with the solver module: the joint objective is
re-derived locally, the scalar slack problem is brute-forced on a grid, and
the per-row weight problem is minimized by coordinate-wise golden-section
search.  These are deliberately slow and simple.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OracleConfig:
    """Knobs for the reference solvers.

    ``step_size`` is the initial subgradient step; the schedule is
    step_size / sqrt(t).  The grid fields drive the scalar brute-force search.
    """

    max_iters: int = 50_000
    step_size: float = 1.0
    grid_lo: float = -10.0
    grid_hi: float = 10.0
    grid_step: float = 1e-4

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.grid_step <= 0:
            raise ValueError("grid_step must be positive")


def joint_objective(W, b, data, lam: float, p: float) -> float:
    """Regularized ensemble training objective, derived independently here:
    half the squared row-wise l1 sums of W, plus lam times the powered hinge
    loss summed over components and instances."""
    W = np.asarray(W, dtype=float)
    b = np.asarray(b, dtype=float)
    penalty = 0.5 * float((np.abs(W).sum(axis=1) ** 2).sum())
    margins = 1.0 - (data.X.T @ W + b) * data.y[:, None]
    loss = float((np.maximum(margins, 0.0) ** p).sum())
    return penalty + lam * loss


def reference_primal_solver(data, lam: float, components: int, p: float,
                            config: OracleConfig = OracleConfig()):
    """Projected subgradient descent on the joint objective.

    Deterministic given its inputs: starts from zero, moves step_size/sqrt(t)
    along the normalized subgradient, projects back onto a ball that provably
    contains every minimizer, and returns the best (W, b, objective) seen.
    Meant for small instances only.
    """
    if p not in (1.0, 2.0, 1, 2):
        raise ValueError("reference solver supports p in {1, 2}")
    M, N = data.X.shape
    X, y = data.X, data.y
    # The zero model has objective lam*C*N, so any minimizer satisfies
    # 0.5*||W||_F^2 <= lam*C*N; the loss bound then confines each bias.
    radius_W = np.sqrt(2.0 * lam * components * N) + 1.0
    column_norm = float(np.linalg.norm(X, axis=0).max())
    radius_b = (components * N) ** (1.0 / p) + column_norm * radius_W + 1.0
    W = np.zeros((M, components))
    b = np.zeros(components)
    best_obj = joint_objective(W, b, data, lam, p)
    best_W, best_b = W.copy(), b.copy()
    for t in range(1, config.max_iters + 1):
        margins = 1.0 - (X.T @ W + b) * y[:, None]
        if p == 1:
            active = (margins > 0.0).astype(float)  # zero subgradient at the kink
        else:
            active = 2.0 * np.maximum(margins, 0.0)
        signed = active * y[:, None]
        grad_W = np.abs(W).sum(axis=1, keepdims=True) * np.sign(W) - lam * (X @ signed)
        grad_b = -lam * signed.sum(axis=0)
        norm = np.sqrt((grad_W**2).sum() + (grad_b**2).sum())
        if norm == 0.0:
            break
        step = config.step_size / (np.sqrt(t) * norm)
        W = W - step * grad_W
        b = b - step * grad_b
        scale_W = np.linalg.norm(W)
        if scale_W > radius_W:
            W *= radius_W / scale_W
        np.clip(b, -radius_b, radius_b, out=b)
        obj = joint_objective(W, b, data, lam, p)
        if obj < best_obj:
            best_obj = obj
            best_W, best_b = W.copy(), b.copy()
    return best_W, best_b, best_obj


def scalar_e_minimizer(y: float, s: float, lambda_over_mu: float, p: float,
                       config: OracleConfig = OracleConfig()) -> float:
    """Brute-force the scalar slack problem
    min_e lambda_over_mu * max(y*e, 0)**p + 0.5 * (e - s)**2 on a grid."""
    grid = np.arange(config.grid_lo, config.grid_hi + 0.5 * config.grid_step, config.grid_step)
    values = lambda_over_mu * np.maximum(y * grid, 0.0) ** p + 0.5 * (grid - s) ** 2
    return float(grid[int(np.argmin(values))])


def w_row_objective(row, P_row, Q_row, mu: float, epsilon: float = 0.0) -> float:
    """Objective of the per-row weight problem:
    0.5 * (sum_c (|row(c)| + epsilon))**2 + mu/2 * ||P_row - row||^2
    + Q_row . (P_row - row).  epsilon = 0 gives the unsmoothed form."""
    row = np.asarray(row, dtype=float)
    P_row = np.asarray(P_row, dtype=float)
    Q_row = np.asarray(Q_row, dtype=float)
    gap = P_row - row
    return float(
        0.5 * (np.abs(row) + epsilon).sum() ** 2 + 0.5 * mu * (gap @ gap) + Q_row @ gap
    )


def _golden_section(fn, lo: float, hi: float, tol: float = 1e-13, max_iters: int = 200) -> float:
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(max_iters):
        if b - a < tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fn(x2)
    return 0.5 * (a + b)


def w_row_reference(P_row, Q_row, mu: float, epsilon: float = 0.0,
                    config: OracleConfig = OracleConfig()) -> np.ndarray:
    """Minimize the per-row weight objective by cyclic coordinate descent,
    each coordinate solved with golden-section search.

    The problem is the proximal map of half a squared l1 norm at
    v = P_row + Q_row / mu, so every coordinate of the minimizer lies between
    0 and the matching coordinate of v; that interval is the search bracket.
    """
    P_row = np.asarray(P_row, dtype=float)
    Q_row = np.asarray(Q_row, dtype=float)
    v = P_row + Q_row / mu
    C = v.size
    row = np.zeros(C)
    previous = w_row_objective(row, P_row, Q_row, mu, epsilon)
    sweeps = min(config.max_iters, 500)
    for _ in range(sweeps):
        for c in range(C):
            rest = float((np.abs(row) + epsilon).sum() - (abs(row[c]) + epsilon))
            p_c, q_c = P_row[c], Q_row[c]

            def coordinate_objective(t):
                return 0.5 * (abs(t) + epsilon + rest) ** 2 + 0.5 * mu * (p_c - t) ** 2 + q_c * (p_c - t)

            row[c] = _golden_section(coordinate_objective, min(0.0, v[c]) - 1e-12,
                                     max(0.0, v[c]) + 1e-12)
        current = w_row_objective(row, P_row, Q_row, mu, epsilon)
        if previous - current < 1e-12:
            break
        previous = current
    return row
