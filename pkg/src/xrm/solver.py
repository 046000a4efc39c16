"""Augmented Lagrangian trainer for exclusivity-regularized linear ensembles.

The training problem couples a powered hinge loss over C linear components
with the row-wise l1,2 penalty from :mod:`xrm.diversity`:

    min_{W, b}  0.5 * sum_j (sum_c |W[j,c]|)^2
                + lam * sum_c sum_i max(0, 1 - (x_i . w_c + b_c) y_i)^p

Two auxiliary blocks make the objective separable: P, a split copy of W, and
E, the per-instance slack matrix with e[i,c] = y_i - (x_i . w_c + b_c), so the
loss becomes a function of (Y * E)_+ alone.  Each outer iteration updates the
blocks in turn (W by iterative reweighting, b in closed form, E elementwise,
P through one cached SPD solve), then performs multiplier ascent on Q and Z
and grows the penalty mu geometrically.  Termination monitors the change of
the primal objective evaluated at the current (W, b).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .diversity import DiversityReport, diversity_report, exclusivity_regularizer
from .model import EnsembleModel


class DivergenceError(RuntimeError):
    """Non-finite solver state; carries the outer iteration that produced it."""

    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration


@dataclass(frozen=True)
class SolverConfig:
    """Training hyperparameters and stopping controls.

    ``lam`` weighs the loss against the diversity penalty, ``components`` is
    the ensemble width C, ``loss_power`` the hinge exponent p >= 1.  The
    penalty mu starts at ``mu_init``, is multiplied by ``rho`` each iteration,
    and is clamped at ``mu_cap`` so late-iteration arithmetic stays well
    conditioned.  ``epsilon`` guards the reweighting denominators.
    """

    lam: float = 2.0
    components: int = 10
    loss_power: float = 2.0
    rho: float = 1.1
    epsilon: float = 1e-10
    mu_init: float = 1.0
    mu_cap: float = 1e10
    outer_tol: float = 0.05
    outer_max_iters: int = 300
    inner_tol: float = 1e-8
    inner_max_iters: int = 100
    general_p_tol: float = 1e-10

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.components < 1:
            raise ValueError("components must be a positive integer")
        if self.loss_power < 1:
            raise ValueError("loss_power must be at least 1")
        if self.rho <= 1:
            raise ValueError("rho must exceed 1")
        if self.epsilon <= 0 or self.mu_init <= 0 or self.mu_cap < self.mu_init:
            raise ValueError("epsilon and mu_init must be positive, mu_cap >= mu_init")
        if self.outer_tol <= 0 or self.inner_tol <= 0 or self.general_p_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.outer_max_iters < 1 or self.inner_max_iters < 1:
            raise ValueError("iteration caps must be positive")

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "components": self.components,
            "loss_power": self.loss_power,
            "rho": self.rho,
            "epsilon": self.epsilon,
            "mu_init": self.mu_init,
            "mu_cap": self.mu_cap,
            "outer_tol": self.outer_tol,
            "outer_max_iters": self.outer_max_iters,
            "inner_tol": self.inner_tol,
            "inner_max_iters": self.inner_max_iters,
            "general_p_tol": self.general_p_tol,
        }


@dataclass
class SolverState:
    """One snapshot of the block variables and multipliers."""

    W: np.ndarray  # features x components
    b: np.ndarray  # components
    E: np.ndarray  # instances x components, slack block
    P: np.ndarray  # features x components, split copy of W
    Q: np.ndarray  # multiplier for P = W
    Z: np.ndarray  # multiplier for the slack constraint
    mu: float
    iteration: int = 0


@dataclass
class TrainReport:
    """Per-iteration traces and summary facts from one training run."""

    objective_trace: list[float] = field(default_factory=list)
    residual_trace: list[tuple[float, float]] = field(default_factory=list)
    multiplier_sup_trace: list[float] = field(default_factory=list)
    iterations: int = 0
    wall_time: float = 0.0
    diversity: DiversityReport | None = None

    def to_dict(self) -> dict:
        return {
            "objective_trace": self.objective_trace,
            "residual_trace": [list(pair) for pair in self.residual_trace],
            "multiplier_sup_trace": self.multiplier_sup_trace,
            "iterations": self.iterations,
            "wall_time": self.wall_time,
            "diversity": self.diversity.to_dict() if self.diversity is not None else None,
        }


def make_initial_state(data, config: SolverConfig) -> SolverState:
    """Starting point: W and Q all ones, everything else zero, mu = mu_init."""
    M, N = data.X.shape
    C = config.components
    return SolverState(
        W=np.ones((M, C)),
        b=np.zeros(C),
        E=np.zeros((N, C)),
        P=np.zeros((M, C)),
        Q=np.ones((M, C)),
        Z=np.zeros((N, C)),
        mu=config.mu_init,
    )


def factor_gram(X: np.ndarray):
    """Cholesky factorization of I + X X^T, reused for every P update."""
    M = X.shape[0]
    K = np.eye(M) + X @ X.T
    try:
        return cho_factor(K)
    except np.linalg.LinAlgError as exc:  # unreachable for finite X
        raise ValueError(f"factorization of the regularized Gram matrix failed: {exc}") from exc


def reweight_G(row: np.ndarray, epsilon: float) -> np.ndarray:
    """Diagonal reweighting for one row of W: ||row||_1 / (|row(c)| + epsilon).

    An all-zero row yields an all-zero diagonal, which turns the next row
    update into a plain ridge step.
    """
    return np.abs(row).sum() / (np.abs(row) + epsilon)


def update_row(G_diag: np.ndarray, P_row: np.ndarray, Q_row: np.ndarray, mu: float) -> np.ndarray:
    """Stationary point of the reweighted row problem:
    (mu * P_row + Q_row) / (G_diag + mu), elementwise."""
    return (mu * P_row + Q_row) / (G_diag + mu)


def solve_w_subproblem(state: SolverState, config: SolverConfig) -> np.ndarray:
    """Minimize the W block by per-row iterative reweighting.

    Rows are independent, so all still-moving rows are updated in lockstep;
    a row retires once its max-norm change drops below ``inner_tol`` or it has
    been updated ``inner_max_iters`` times.  The fixed point is the global
    minimizer of the row problem.
    """
    W = state.W.copy()
    rhs = state.mu * state.P + state.Q
    active = np.arange(W.shape[0])
    for _ in range(config.inner_max_iters):
        rows = W[active]
        G = np.abs(rows).sum(axis=1, keepdims=True) / (np.abs(rows) + config.epsilon)
        updated = rhs[active] / (G + state.mu)
        W[active] = updated
        moved = np.abs(updated - rows).max(axis=1) >= config.inner_tol
        active = active[moved]
        if active.size == 0:
            break
    return W


def update_b(state: SolverState, data) -> np.ndarray:
    """Closed-form bias update: per-component mean of Y - E - X^T P - Z / mu."""
    residual = data.y[:, None] - state.E - data.X.T @ state.P - state.Z / state.mu
    return residual.mean(axis=0)


def _positive_branch_minimizer(a: np.ndarray, k: float, p: float, tol: float) -> np.ndarray:
    """Solve min_{t >= 0} k * t^p + 0.5 * (t - a)^2 by bisecting its monotone
    derivative.  ``a`` holds the (positive) targets of the active branch."""
    with np.errstate(over="ignore"):
        excess = float(np.float64(k) ** (1.0 / (p - 1.0)))
    if not np.isfinite(excess):
        # The stationary point never exceeds a, so a finite bracket suffices.
        excess = 0.0
    lo = np.zeros_like(a)
    hi = np.abs(a) + excess + 1.0
    for _ in range(200):
        if float((hi - lo).max()) <= tol:
            break
        mid = 0.5 * (lo + hi)
        positive = k * p * mid ** (p - 1.0) + mid - a > 0.0
        hi = np.where(positive, mid, hi)
        lo = np.where(positive, lo, mid)
    return 0.5 * (lo + hi)


def update_E(S: np.ndarray, Y: np.ndarray, lam: float, mu: float, p: float,
             general_p_tol: float = 1e-10) -> np.ndarray:
    """Elementwise minimizer of (lam/mu) * (Y*E)_+^p + 0.5 * (E - S)^2.

    p = 1 soft-thresholds the entries whose target violates the margin,
    p = 2 shrinks them by 1 / (1 + 2 lam/mu), and any other p >= 1 falls back
    to a bisection on the active branch followed by a branch comparison.
    Entries with Y*S <= 0 keep their target S.
    """
    if p < 1:
        raise ValueError("loss power p must be at least 1")
    k = lam / mu
    active = (Y * S) > 0.0
    if p == 1:
        shrunk = np.sign(S) * np.maximum(np.abs(S) - k, 0.0)
        return np.where(active, shrunk, S)
    if p == 2:
        return np.where(active, S / (1.0 + 2.0 * k), S)
    E = S.copy()
    if np.any(active):
        a = (Y * S)[active]
        t = _positive_branch_minimizer(a, k, p, general_p_tol)
        branch_obj = k * t**p + 0.5 * (t - a) ** 2
        boundary_obj = 0.5 * a**2  # best the complementary branch can do here
        t = np.where(branch_obj <= boundary_obj, t, 0.0)
        E[active] = (Y[active]) * t
    return E


def update_P(state: SolverState, data, W_new: np.ndarray, E_new: np.ndarray,
             b_new: np.ndarray, K_factor) -> np.ndarray:
    """Closed-form P update through the cached factorization of I + X X^T:
    solve (I + X X^T) P = W - Q/mu + X (R - E) with R = Y - 1 b^T - Z/mu."""
    R = data.y[:, None] - b_new[None, :] - state.Z / state.mu
    rhs = W_new - state.Q / state.mu + data.X @ (R - E_new)
    return cho_solve(K_factor, rhs)


def update_multipliers(state: SolverState, data, W_new: np.ndarray, E_new: np.ndarray,
                       P_new: np.ndarray, b_new: np.ndarray, rho: float,
                       mu_cap: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Ascent on both multipliers, then geometric penalty growth capped at
    mu_cap."""
    slack_residual = E_new - data.y[:, None] + data.X.T @ P_new + b_new[None, :]
    Z = state.Z + state.mu * slack_residual
    Q = state.Q + state.mu * (P_new - W_new)
    mu = min(rho * state.mu, mu_cap)
    return Z, Q, mu


def primal_objective(W: np.ndarray, b: np.ndarray, data, lam: float, p: float) -> float:
    """The quantity being minimized: diversity penalty plus weighted powered
    hinge loss over all components and instances."""
    margins = 1.0 - (data.X.T @ W + b[None, :]) * data.y[:, None]
    loss = float((np.maximum(margins, 0.0) ** p).sum())
    return exclusivity_regularizer(W) + lam * loss


def constraint_residuals(state: SolverState, data) -> tuple[float, float]:
    """Frobenius norms of (P - W) and (E - Y + X^T P + 1 b^T)."""
    split_gap = state.P - state.W
    slack_gap = state.E - data.y[:, None] + data.X.T @ state.P + state.b[None, :]
    return float(np.linalg.norm(split_gap)), float(np.linalg.norm(slack_gap))


def train(data, config: SolverConfig = SolverConfig()) -> tuple[EnsembleModel, TrainReport]:
    """Run the outer loop to convergence and return the averaged ensemble.

    Stops when the absolute change of the primal objective between consecutive
    outer iterations falls below ``outer_tol``, or at ``outer_max_iters``.
    The report carries per-iteration objective, residual, and multiplier-size
    traces together with the final diversity structure.
    """
    started = time.perf_counter()
    Y = np.repeat(data.y[:, None], config.components, axis=1)
    K_factor = factor_gram(data.X)
    state = make_initial_state(data, config)
    report = TrainReport()
    previous_objective = None
    for iteration in range(1, config.outer_max_iters + 1):
        W = solve_w_subproblem(state, config)
        b = update_b(state, data)
        S = Y - data.X.T @ state.P - b[None, :] - state.Z / state.mu
        E = update_E(S, Y, config.lam, state.mu, config.loss_power, config.general_p_tol)
        P = update_P(state, data, W, E, b, K_factor)
        Z, Q, mu = update_multipliers(state, data, W, E, P, b, config.rho, config.mu_cap)
        state.W, state.b, state.E, state.P, state.Z, state.Q, state.mu = W, b, E, P, Z, Q, mu
        state.iteration = iteration

        if not all(np.all(np.isfinite(block)) for block in (W, b, E, P, Z, Q)):
            raise DivergenceError(f"non-finite solver state at iteration {iteration}", iteration)

        objective = primal_objective(W, b, data, config.lam, config.loss_power)
        report.objective_trace.append(objective)
        report.residual_trace.append(constraint_residuals(state, data))
        report.multiplier_sup_trace.append(max(float(np.abs(Z).max()), float(np.abs(Q).max())))

        if previous_objective is not None and abs(objective - previous_objective) < config.outer_tol:
            break
        previous_objective = objective

    report.iterations = state.iteration
    report.wall_time = time.perf_counter() - started
    report.diversity = diversity_report(state.W)
    model = EnsembleModel(W=state.W, b=state.b, lam=config.lam, p=config.loss_power)
    return model, report
