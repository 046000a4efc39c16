import numpy as np
import pytest
from scipy.linalg import cho_factor

from conftest import make_blobs, random_instance
from xrm import DataSet, SolverConfig, train
from xrm import oracles, solver
from xrm.diversity import exclusivity_regularizer
from xrm.model import EnsembleModel, average_component_loss


def _state(W=None, b=None, E=None, P=None, Q=None, Z=None, mu=1.0):
    shapes = [a.shape for a in (W, P, Q) if a is not None]
    M, C = shapes[0]
    N = E.shape[0] if E is not None else (Z.shape[0] if Z is not None else 1)
    return solver.SolverState(
        W=W if W is not None else np.ones((M, C)),
        b=b if b is not None else np.zeros(C),
        E=E if E is not None else np.zeros((N, C)),
        P=P if P is not None else np.zeros((M, C)),
        Q=Q if Q is not None else np.zeros((M, C)),
        Z=Z if Z is not None else np.zeros((N, C)),
        mu=mu,
    )


class TestConfig:
    def test_defaults(self):
        config = SolverConfig()
        assert config.lam == 2.0
        assert config.rho == 1.1
        assert config.mu_init == 1.0
        assert config.outer_tol == 0.05

    @pytest.mark.parametrize("kwargs", [
        {"lam": 0.0}, {"components": 0}, {"loss_power": 0.5}, {"rho": 1.0},
        {"epsilon": 0.0}, {"mu_init": 0.0}, {"mu_cap": 0.5}, {"outer_tol": 0.0},
        {"outer_max_iters": 0}, {"inner_max_iters": 0},
    ])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)


class TestInitialState:
    def test_starting_point(self):
        data = DataSet(X=np.ones((3, 5)), y=np.array([1.0, -1.0, 1.0, -1.0, 1.0]))
        state = solver.make_initial_state(data, SolverConfig(components=2))
        np.testing.assert_array_equal(state.W, np.ones((3, 2)))
        np.testing.assert_array_equal(state.b, np.zeros(2))
        np.testing.assert_array_equal(state.P, np.zeros((3, 2)))
        np.testing.assert_array_equal(state.Q, np.ones((3, 2)))
        np.testing.assert_array_equal(state.Z, np.zeros((5, 2)))
        assert state.mu == 1.0


class TestReweight:
    def test_symmetric_row(self):
        np.testing.assert_allclose(solver.reweight_G(np.array([1.0, -1.0]), 1e-15), [2.0, 2.0])

    def test_zero_coordinate_heavily_penalized(self):
        G = solver.reweight_G(np.array([3.0, 0.0]), 1e-10)
        assert G[0] == pytest.approx(1.0, rel=1e-9)
        assert G[1] == pytest.approx(3e10)

    def test_zero_row(self):
        np.testing.assert_array_equal(solver.reweight_G(np.zeros(3), 1e-10), np.zeros(3))


class TestUpdateRow:
    def test_basic(self):
        out = solver.update_row(np.array([1.0, 1.0]), np.array([1.0, 1.0]),
                                np.array([0.0, 0.0]), mu=1.0)
        np.testing.assert_allclose(out, [0.5, 0.5])

    def test_multiplier_only(self):
        out = solver.update_row(np.array([1.0, 2.0]), np.array([0.0, 0.0]),
                                np.array([3.0, 0.0]), mu=2.0)
        np.testing.assert_allclose(out, [1.0, 0.0])

    def test_zero_weighting_is_ridge_limit(self):
        P_row = np.array([0.4, -0.2])
        Q_row = np.array([1.0, 2.0])
        out = solver.update_row(np.zeros(2), P_row, Q_row, mu=4.0)
        np.testing.assert_allclose(out, P_row + Q_row / 4.0)


class TestWSubproblem:
    def test_penalty_dominated_limit(self):
        P = np.array([[0.3, -0.2], [1.0, 0.5]])
        Q = np.array([[0.1, 0.4], [-0.3, 0.2]])
        state = _state(W=np.ones((2, 2)), P=P, Q=Q, mu=1e8)
        W = solver.solve_w_subproblem(state, SolverConfig(components=2))
        np.testing.assert_allclose(W, P, atol=1e-6)

    def test_zero_inputs_give_zero_row(self):
        state = _state(W=np.ones((1, 3)), P=np.zeros((1, 3)), Q=np.zeros((1, 3)), mu=1.0)
        W = solver.solve_w_subproblem(state, SolverConfig(components=3))
        np.testing.assert_allclose(W, 0.0, atol=1e-12)

    def test_known_symmetric_solution(self):
        # with targets (1, 1) and mu = 1 the row optimum is (1/3, 1/3)
        state = _state(W=np.ones((1, 2)), P=np.array([[1.0, 1.0]]), Q=np.zeros((1, 2)), mu=1.0)
        W = solver.solve_w_subproblem(state, SolverConfig(components=2))
        np.testing.assert_allclose(W, [[1 / 3, 1 / 3]], atol=1e-6)

    def test_matches_reference_on_random_rows(self):
        rng = np.random.default_rng(17)
        config = SolverConfig(components=5, inner_max_iters=200_000)
        for _ in range(40):
            C = int(rng.integers(1, 6))
            P_row = rng.normal(size=(1, C))
            Q_row = rng.normal(size=(1, C))
            mu = float(rng.uniform(0.2, 5.0))
            state = _state(W=np.ones((1, C)), P=P_row, Q=Q_row, mu=mu)
            W = solver.solve_w_subproblem(state, config)
            reference = oracles.w_row_reference(P_row[0], Q_row[0], mu)
            ours = oracles.w_row_objective(W[0], P_row[0], Q_row[0], mu)
            best = oracles.w_row_objective(reference, P_row[0], Q_row[0], mu)
            assert ours <= best + 1e-6


class TestUpdateB:
    def test_column_mean(self):
        data = DataSet(X=np.zeros((1, 2)), y=np.array([1.0, -1.0]))
        # choose E so that the residual matrix has one column equal to (1, 3)
        E = data.y[:, None] - np.array([[1.0], [3.0]])
        state = _state(W=np.ones((1, 1)), E=E, P=np.zeros((1, 1)), Z=np.zeros((2, 1)))
        assert solver.update_b(state, data) == pytest.approx(np.array([2.0]))

    def test_zero_residual(self):
        data = DataSet(X=np.zeros((1, 3)), y=np.array([1.0, -1.0, 1.0]))
        state = _state(W=np.ones((1, 2)), E=data.y[:, None] * np.ones((1, 2)),
                       P=np.zeros((1, 2)), Z=np.zeros((3, 2)))
        np.testing.assert_allclose(solver.update_b(state, data), np.zeros(2))

    def test_minimizes_by_finite_differences(self):
        rng = np.random.default_rng(19)
        M, N, C = 3, 7, 2
        data = DataSet(X=rng.normal(size=(M, N)), y=rng.choice([-1.0, 1.0], N))
        state = _state(W=rng.normal(size=(M, C)), E=rng.normal(size=(N, C)),
                       P=rng.normal(size=(M, C)), Z=rng.normal(size=(N, C)),
                       Q=rng.normal(size=(M, C)), mu=1.7)
        b = solver.update_b(state, data)

        def penalty(b_vec):
            resid = state.E - data.y[:, None] + data.X.T @ state.P + b_vec[None, :]
            return 0.5 * state.mu * (resid**2).sum() + (state.Z * resid).sum()

        h = 1e-6
        for c in range(C):
            shift = np.zeros(C)
            shift[c] = h
            gradient = (penalty(b + shift) - penalty(b - shift)) / (2 * h)
            assert abs(gradient) < 1e-5


class TestUpdateE:
    def test_soft_threshold_cases(self):
        Y = np.array([[1.0], [1.0], [-1.0]])
        S = np.array([[2.0], [0.3], [0.3]])
        E = solver.update_E(S, Y, lam=0.5, mu=1.0, p=1.0)
        np.testing.assert_allclose(E, [[1.5], [0.0], [0.3]])

    def test_quadratic_shrink(self):
        E = solver.update_E(np.array([[2.0]]), np.array([[1.0]]), lam=0.5, mu=1.0, p=2.0)
        assert E[0, 0] == pytest.approx(1.0)

    def test_intermediate_power(self):
        # frozen from the grid oracle: argmin of t^1.5 + (t-2)^2/2 is ~0.723828
        E = solver.update_E(np.array([[2.0]]), np.array([[1.0]]), lam=1.0, mu=1.0, p=1.5)
        assert E[0, 0] == pytest.approx(0.7238284, abs=1e-6)
        reference = oracles.scalar_e_minimizer(1.0, 2.0, 1.0, 1.5)
        assert abs(E[0, 0] - reference) <= 1e-4

    def test_vanishing_loss_returns_target(self):
        rng = np.random.default_rng(21)
        S = rng.normal(size=(6, 3))
        Y = rng.choice([-1.0, 1.0], size=(6, 1)) * np.ones((1, 3))
        for p in (1.0, 1.7, 2.0):
            E = solver.update_E(S, Y, lam=1e-14, mu=1.0, p=p)
            np.testing.assert_allclose(E, S, atol=1e-10)

    def test_rejects_power_below_one(self):
        with pytest.raises(ValueError):
            solver.update_E(np.ones((1, 1)), np.ones((1, 1)), lam=1.0, mu=1.0, p=0.5)

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(22)
        for _ in range(60):
            y = float(rng.choice([-1.0, 1.0]))
            s = float(rng.uniform(-5, 5))
            k = float(rng.uniform(0.01, 3.0))
            p = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
            e = solver.update_E(np.array([[s]]), np.array([[y]]), lam=k, mu=1.0, p=p)[0, 0]
            reference = oracles.scalar_e_minimizer(y, s, k, p)
            assert abs(e - reference) <= 1e-4


class TestUpdateP:
    def test_zero_features(self):
        data = DataSet(X=np.zeros((2, 3)), y=np.array([1.0, -1.0, 1.0]))
        W = np.array([[1.0, 2.0], [3.0, 4.0]])
        Q = np.array([[0.5, 0.0], [0.0, 0.5]])
        state = _state(W=W, Q=Q, E=np.zeros((3, 2)), P=np.zeros((2, 2)), Z=np.zeros((3, 2)), mu=2.0)
        K = cho_factor(np.eye(2) + data.X @ data.X.T)
        P = solver.update_P(state, data, W, np.zeros((3, 2)), np.zeros(2), K)
        np.testing.assert_allclose(P, W - Q / 2.0)

    def test_matches_generic_dense_solve(self):
        rng = np.random.default_rng(23)
        M, N, C = 4, 9, 3
        data = DataSet(X=rng.normal(size=(M, N)), y=rng.choice([-1.0, 1.0], N))
        W = rng.normal(size=(M, C))
        E = rng.normal(size=(N, C))
        b = rng.normal(size=C)
        state = _state(W=W, E=E, P=rng.normal(size=(M, C)), Q=rng.normal(size=(M, C)),
                       Z=rng.normal(size=(N, C)), mu=1.3)
        K = cho_factor(np.eye(M) + data.X @ data.X.T)
        P = solver.update_P(state, data, W, E, b, K)
        R = data.y[:, None] - b[None, :] - state.Z / state.mu
        rhs = W - state.Q / state.mu + data.X @ (R - E)
        expected = np.linalg.solve(np.eye(M) + data.X @ data.X.T, rhs)
        np.testing.assert_allclose(P, expected, atol=1e-8)

    def test_first_order_optimality(self):
        rng = np.random.default_rng(24)
        M, N, C = 3, 6, 2
        data = DataSet(X=rng.normal(size=(M, N)), y=rng.choice([-1.0, 1.0], N))
        W = rng.normal(size=(M, C))
        E = rng.normal(size=(N, C))
        b = rng.normal(size=C)
        state = _state(W=W, E=E, P=rng.normal(size=(M, C)), Q=rng.normal(size=(M, C)),
                       Z=rng.normal(size=(N, C)), mu=0.9)
        K = cho_factor(np.eye(M) + data.X @ data.X.T)
        P = solver.update_P(state, data, W, E, b, K)

        def objective(P_mat):
            split = P_mat - W
            slack = E - data.y[:, None] + data.X.T @ P_mat + b[None, :]
            return (0.5 * state.mu * (split**2).sum() + (state.Q * split).sum()
                    + 0.5 * state.mu * (slack**2).sum() + (state.Z * slack).sum())

        h = 1e-6
        worst = 0.0
        for j in range(M):
            for c in range(C):
                shift = np.zeros((M, C))
                shift[j, c] = h
                gradient = (objective(P + shift) - objective(P - shift)) / (2 * h)
                worst = max(worst, abs(gradient))
        assert worst < 1e-6


class TestMultipliers:
    def test_feasible_state_only_grows_mu(self):
        data = DataSet(X=np.zeros((2, 3)), y=np.array([1.0, -1.0, 1.0]))
        W = np.ones((2, 2))
        b = np.zeros(2)
        E = data.y[:, None] * np.ones((1, 2))  # feasible: E = Y - X^T P - 1 b^T with X = 0
        state = _state(W=W, E=E, P=W.copy(), Q=np.ones((2, 2)), Z=np.ones((3, 2)), mu=1.0)
        Z, Q, mu = solver.update_multipliers(state, data, W, E, W.copy(), b,
                                             rho=1.1, mu_cap=1e10)
        np.testing.assert_array_equal(Z, state.Z)
        np.testing.assert_array_equal(Q, state.Q)
        assert mu == pytest.approx(1.1)

    def test_unit_residual_steps_by_mu(self):
        data = DataSet(X=np.zeros((2, 2)), y=np.array([1.0, -1.0]))
        W = np.zeros((2, 2))
        P = W + 1.0
        E = data.y[:, None] * np.ones((1, 2)) + 1.0
        state = _state(W=W, E=E, P=P, Q=np.zeros((2, 2)), Z=np.zeros((2, 2)), mu=2.0)
        Z, Q, mu = solver.update_multipliers(state, data, W, E, P, np.zeros(2),
                                             rho=1.5, mu_cap=1e10)
        np.testing.assert_allclose(Q, np.full((2, 2), 2.0))
        np.testing.assert_allclose(Z, np.full((2, 2), 2.0))
        assert mu == 3.0

    def test_mu_cap(self):
        data = DataSet(X=np.zeros((1, 1)), y=np.array([1.0]))
        state = _state(W=np.zeros((1, 1)), E=np.ones((1, 1)), P=np.zeros((1, 1)),
                       Z=np.zeros((1, 1)), mu=9e9)
        _, _, mu = solver.update_multipliers(state, data, np.zeros((1, 1)), np.ones((1, 1)),
                                             np.zeros((1, 1)), np.zeros(1), rho=2.0, mu_cap=1e10)
        assert mu == 1e10


class TestPrimalObjective:
    def test_hand_computed(self):
        data = DataSet(X=np.zeros((2, 1)), y=np.array([1.0]))
        value = solver.primal_objective(np.array([[1.0], [0.0]]), np.zeros(1), data,
                                        lam=1.0, p=1.0)
        assert value == pytest.approx(1.5)

    def test_zero_model(self):
        N = 5
        data = DataSet(X=np.zeros((2, N)), y=np.ones(N))
        assert solver.primal_objective(np.zeros((2, 1)), np.zeros(1), data, 1.0, 2.0) == N
        assert solver.primal_objective(np.zeros((2, 3)), np.zeros(3), data, 1.0, 2.0) == 3 * N

    def test_compositional_identity(self):
        rng = np.random.default_rng(25)
        data = DataSet(X=rng.normal(size=(4, 12)), y=rng.choice([-1.0, 1.0], 12))
        W = rng.normal(size=(4, 3))
        b = rng.normal(size=3)
        for lam, p in ((0.5, 1.0), (2.0, 2.0)):
            model = EnsembleModel(W=W, b=b, lam=lam, p=p)
            expected = exclusivity_regularizer(W) + lam * 3 * average_component_loss(model, data, p)
            assert solver.primal_objective(W, b, data, lam, p) == pytest.approx(expected, abs=1e-12)


class TestResiduals:
    def test_feasible(self):
        rng = np.random.default_rng(26)
        data = DataSet(X=rng.normal(size=(3, 5)), y=rng.choice([-1.0, 1.0], 5))
        W = rng.normal(size=(3, 2))
        b = rng.normal(size=2)
        E = data.y[:, None] - data.X.T @ W - b[None, :]
        state = _state(W=W, b=b, E=E, P=W.copy(), Z=np.zeros((5, 2)))
        np.testing.assert_allclose(solver.constraint_residuals(state, data), (0.0, 0.0),
                                   atol=1e-12)

    def test_unit_offset(self):
        data = DataSet(X=np.zeros((3, 4)), y=np.ones(4))
        W = np.zeros((3, 2))
        E = np.ones((4, 1)) * np.array([[1.0, 1.0]])
        state = _state(W=W, b=np.zeros(2), E=E + 0.0, P=W + 1.0, Z=np.zeros((4, 2)))
        first, _ = solver.constraint_residuals(state, data)
        assert first == pytest.approx(np.sqrt(3 * 2))


class TestTrain:
    def test_two_point_problem(self):
        data = DataSet(X=np.array([[1.0, -1.0]]), y=np.array([1.0, -1.0]))
        config = SolverConfig(lam=2.0, components=2, loss_power=2.0,
                              outer_tol=1e-8, outer_max_iters=400)
        model, report = train(data, config)
        from xrm.model import test_error
        assert test_error(model, data) == 0.0
        # analytic optimum: 2 w^2 + 8 (1 - w)^2 minimized at w = 0.8, value 1.6
        assert report.objective_trace[-1] == pytest.approx(1.6, rel=0.01)

    def test_traces_match_iterations(self):
        data = make_blobs(40, 3, seed=2)
        _, report = train(data, SolverConfig(components=2))
        assert len(report.objective_trace) == report.iterations
        assert len(report.residual_trace) == report.iterations
        assert len(report.multiplier_sup_trace) == report.iterations

    def test_deterministic(self):
        data = make_blobs(30, 3, seed=5)
        config = SolverConfig(components=3)
        _, first = train(data, config)
        _, second = train(data, config)
        assert first.objective_trace == second.objective_trace

    def test_feasible_at_tight_termination(self):
        rng = np.random.default_rng(27)
        data = random_instance(rng, n_max=25, m_max=5)
        config = SolverConfig(components=2, rho=1.05, outer_tol=1e-10, outer_max_iters=1200)
        _, report = train(data, config)
        first, second = report.residual_trace[-1]
        assert first < 1e-3
        assert second < 1e-3

    def test_report_contains_diversity(self):
        data = make_blobs(30, 3, seed=6)
        model, report = train(data, SolverConfig(components=2))
        assert report.diversity is not None
        assert report.diversity.regularizer_value == pytest.approx(
            exclusivity_regularizer(model.W)
        )

    def test_converges_quickly_on_synthetic(self):
        data = make_blobs(100, 5, seed=7)
        _, report = train(data, SolverConfig(components=4))
        assert report.iterations <= 150

    def test_intermediate_power_end_to_end(self):
        data = make_blobs(50, 4, seed=8)
        config = SolverConfig(components=3, loss_power=1.5, rho=1.05,
                              outer_tol=1e-10, outer_max_iters=800)
        model, report = train(data, config)
        assert model.p == 1.5
        first, second = report.residual_trace[-1]
        assert first < 1e-3 and second < 1e-3
        assert np.all(np.isfinite(model.W))

    def test_divergence_error_attributes(self):
        err = solver.DivergenceError("boom", iteration=12)
        assert err.iteration == 12
        assert "boom" in str(err)
