import math

import numpy as np
import pytest

from mutualctl import (
    CertificationWarning,
    LipschitzData,
    MatrixNotConvergent,
    OuterNotConverged,
    ProblemParams,
    ScalarExp,
    SolverConfig,
    TimeGrid,
    Trajectory,
    apply_N_obs,
    build_M_obs,
    is_convergent_to_zero,
    norm_S_at,
    observability_solve,
    spectral_radius,
)
from mutualctl.nonlinearities import make_nonlinearity, pointwise_pair, scalar_lipschitz_data

from oracles import membership_defect, obs_pair_direct

DECAY = ScalarExp(lam=-1.0, T=1.0)
ZERO_PAIR = pointwise_pair(make_nonlinearity("zero", []))
ZERO_LIP = scalar_lipschitz_data(make_nonlinearity("zero", []))

# a = b = k = 1 keeps the outer map non-expansive: e^{-1} < 2 / (1/a + 1/b) = 1.
OBS_P = ProblemParams(a=1.0, b=1.0, k=1.0, T=1.0)
OBS_PAIR = pointwise_pair(make_nonlinearity("sin-cos", [0.1, 0.1]))
OBS_LIP = LipschitzData(0.1, 0.1, 0.1, 0.1)


class TestBuildMObs:
    def test_zero_constants(self):
        M = build_M_obs(OBS_P, LipschitzData(0, 0, 0, 0), 1.0)
        assert np.all(M.as_array() == 0.0)

    def test_uniform_example(self):
        M = build_M_obs(OBS_P, OBS_LIP, 1.0)
        assert M.as_array() == pytest.approx(0.3 * np.ones((2, 2)), abs=1e-14)
        assert is_convergent_to_zero(M)
        assert spectral_radius(M) == pytest.approx(0.6)

    def test_linear_in_T(self):
        p2 = ProblemParams(a=1.0, b=1.0, k=1.0, T=2.0)
        M1 = build_M_obs(OBS_P, OBS_LIP, 1.0).as_array()
        M2 = build_M_obs(p2, OBS_LIP, 1.0).as_array()
        assert np.allclose(M2, 2.0 * M1)


class TestApplyNObs:
    def test_identity_constants(self):
        p = ProblemParams(a=2.0, b=3.0, k=1.5, T=1.0)
        S = ScalarExp(lam=0.0, T=1.0)
        grid = TimeGrid(1.0, 8)
        x = Trajectory.constant(grid, [0.4])
        y = Trajectory.constant(grid, [-0.2])
        alpha, beta = 0.7, 0.3
        n1, n2 = apply_N_obs(p, S, ZERO_PAIR, [alpha], [beta], x, y)
        expected_1 = (alpha - p.k * beta + p.k * p.b * beta) / p.a
        expected_2 = (-alpha + p.k * beta + p.a * alpha) / (p.k * p.b)
        assert np.allclose(n1.values, expected_1)
        assert np.allclose(n2.values, expected_2)

    def test_zero_inputs_zero_outputs(self):
        grid = TimeGrid(1.0, 8)
        zero = Trajectory.constant(grid, [0.0])
        n1, n2 = apply_N_obs(OBS_P, DECAY, ZERO_PAIR, [0.0], [0.0], zero, zero)
        assert np.all(n1.values == 0.0)
        assert np.all(n2.values == 0.0)

    def test_matches_independent_quadrature(self):
        grid = TimeGrid(1.0, 2048)
        x = Trajectory.constant(grid, [0.1])
        y = Trajectory.constant(grid, [-0.3])
        n1, n2 = apply_N_obs(OBS_P, DECAY, OBS_PAIR, [0.2], [0.4], x, y)
        F = lambda u, v: 0.1 * math.sin(v)
        G = lambda u, v: 0.1 * math.cos(u)
        x_ref, y_ref = obs_pair_direct(
            -1.0, F, G, 1.0, 1.0, 1.0, 1.0, 0.2, 0.4,
            grid.nodes, x.values[:, 0], y.values[:, 0],
        )
        assert np.allclose(n1.values[:, 0], x_ref, atol=1e-12)
        assert np.allclose(n2.values[:, 0], y_ref, atol=1e-12)


class TestObservabilitySolve:
    def test_zero_data_fixed_immediately(self):
        alpha, beta, x, y, report = observability_solve(
            OBS_P, DECAY, ZERO_PAIR, ZERO_LIP, TimeGrid(1.0, 32), SolverConfig(),
            np.array([0.0]), np.array([0.0]),
        )
        assert alpha[0] == 0.0 and beta[0] == 0.0
        assert report.iterations == 1
        assert report.defect == 0.0

    def test_linear_family_member_reached(self):
        # S = e^{-1} I with a = b = 2, k = 1: every alpha = beta is a fixed
        # point, so the solver lands on some family member and the defect
        # vanishes.
        p = ProblemParams(a=2.0, b=2.0, k=1.0, T=1.0)
        alpha, beta, x, y, report = observability_solve(
            p, DECAY, ZERO_PAIR, ZERO_LIP, TimeGrid(1.0, 64), SolverConfig(tol=1e-12),
            np.array([0.7]), np.array([0.1]),
        )
        assert alpha[0] == pytest.approx(beta[0], abs=1e-10)
        assert report.defect < 1e-10
        assert report.converged

    def test_scalar_nonlinear_membership(self):
        tol = 1e-10
        with pytest.warns(CertificationWarning):
            # F - kG boundedness is not declared on the raw pair, so the
            # solver warns; the |S(T)| threshold itself holds.
            pair = pointwise_pair(make_nonlinearity("sin-cos", [0.1, 0.1]))
            pair = type(pair)(F=pair.F, G=pair.G, F_rows=pair.F_rows, G_rows=pair.G_rows,
                              h_bounded=False)
            alpha, beta, x, y, report = observability_solve(
                OBS_P, DECAY, pair, OBS_LIP, TimeGrid(1.0, 256), SolverConfig(tol=tol),
                np.array([0.3]), np.array([-0.2]),
            )
        assert report.converged
        assert x.values[0, 0] == alpha[0] and y.values[0, 0] == beta[0]
        assert report.defect <= report.defect_tol
        # oracle confirms membership in the solution manifold up to O(dt^2)
        F = lambda u, v: 0.1 * math.sin(v)
        G = lambda u, v: 0.1 * math.cos(u)
        assert membership_defect(-1.0, F, G, 1.0, 1.0, 1.0, 1.0, alpha[0], beta[0]) < 5e-7

    def test_no_warning_when_conditions_hold(self):
        import warnings as w

        with w.catch_warnings():
            w.simplefilter("error", CertificationWarning)
            observability_solve(
                OBS_P, DECAY, OBS_PAIR, OBS_LIP, TimeGrid(1.0, 32), SolverConfig(),
                np.array([0.1]), np.array([0.0]),
            )

    def test_norm_threshold_warning(self):
        # a = b = 0.25 puts 2/(1/a + 1/b) = 0.25 below |S(T)| = e^{-1}.
        p = ProblemParams(a=0.25, b=0.25, k=1.0, T=1.0)
        sharp = scalar_lipschitz_data(make_nonlinearity("sin-cos", [0.1, 0.1]))
        assert not norm_S_at(DECAY, 1.0) < 2.0 / (1.0 / p.a + 1.0 / p.b)
        with pytest.warns(CertificationWarning):
            with pytest.raises(OuterNotConverged):
                observability_solve(
                    p, DECAY, OBS_PAIR, sharp, TimeGrid(1.0, 32),
                    SolverConfig(relaxation=1.0, max_iter=40),
                    np.array([0.1]), np.array([0.0]),
                )

    def test_outer_divergence_reported_with_history(self):
        # Undamped iteration with the final-condition map expanding
        # transversally: the inner certificate still holds (rho = 0.9 with
        # the sharp sin-cos constants) but the outer loop runs away; the
        # report must carry the residual history.
        p = ProblemParams(a=0.25, b=0.25, k=1.0, T=1.0)
        sharp = scalar_lipschitz_data(make_nonlinearity("sin-cos", [0.1, 0.1]))
        M = build_M_obs(p, sharp, 1.0)
        assert is_convergent_to_zero(M)
        assert spectral_radius(M) == pytest.approx(0.9)
        with pytest.warns(CertificationWarning):
            with pytest.raises(OuterNotConverged) as err:
                observability_solve(
                    p, DECAY, OBS_PAIR, sharp, TimeGrid(1.0, 32),
                    SolverConfig(relaxation=1.0, max_iter=40),
                    np.array([0.1]), np.array([0.0]),
                )
        report = err.value.report
        assert report is not None and not report.converged
        assert len(report.residual_history) == 40
        # residuals grow: genuine divergence, not a tolerance shortfall
        first = sum(report.residual_history[0])
        last = sum(report.residual_history[-1])
        assert last > 100 * first

    def test_certification_refusal(self):
        big = LipschitzData(1.0, 1.0, 1.0, 1.0)
        with pytest.raises(MatrixNotConvergent):
            observability_solve(
                OBS_P, DECAY, OBS_PAIR, big, TimeGrid(1.0, 16), SolverConfig(),
                np.array([0.0]), np.array([0.0]),
            )

    def test_mild_identity_at_solution(self):
        from mutualctl import conv

        alpha, beta, x, y, _ = observability_solve(
            OBS_P, DECAY, OBS_PAIR, OBS_LIP, TimeGrid(1.0, 128), SolverConfig(),
            np.array([0.3]), np.array([-0.2]),
        )
        grid = x.grid
        Fv = Trajectory(grid, 0.1 * np.sin(y.values))
        Gv = Trajectory(grid, 0.1 * np.cos(x.values))
        for i in (0, 50, 128):
            t = grid.nodes[i]
            rx = x.values[i] - (math.exp(-t) * alpha + conv(DECAY, Fv, i))
            ry = y.values[i] - (math.exp(-t) * beta + conv(DECAY, Gv, i))
            assert abs(rx[0]) < 1e-9 and abs(ry[0]) < 1e-9
