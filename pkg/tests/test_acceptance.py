"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
complete.  Tolerances and runtime budgets are pinned here, not configurable.
"""

import math
import subprocess
import sys
import time
from contextlib import contextmanager

import numpy as np

from mutualctl import (
    DiffusionConfig,
    LipschitzData,
    NonnegMatrix2,
    ProblemParams,
    ScalarExp,
    SingularOrNotConvergent,
    SolverConfig,
    ThetaCoefficients,
    ThetaStatus,
    TimeGrid,
    Trajectory,
    build_M_semi,
    conv,
    control_defect,
    eval_h,
    find_theta,
    inverse_I_minus,
    is_convergent_to_zero,
    m_theta,
    make_nonlinearity,
    observability_solve,
    perov_solve_semi,
    pointwise_pair,
    run_demo,
    scalar_lipschitz_data,
    semi_theta_coefficients,
    spectral_radius,
    verify_localization,
)

from oracles import rk4_pair, shoot_semi_x0


@contextmanager
def criterion(num, name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {num:02d} {name}: FAIL")
        raise
    print(f"ACCEPTANCE {num:02d} {name}: PASS")


# Shared scalar benchmark (criterion 4 problem): x' = -x + 0.1 sin y,
# y' = -y + 0.1 cos x, a=2, b=1, k=1, T=1, y(0) = 0.5.
BENCH_P = ProblemParams(a=2.0, b=1.0, k=1.0, T=1.0)
BENCH_S = ScalarExp(lam=-1.0, T=1.0)
BENCH_PAIR = pointwise_pair(make_nonlinearity("sin-cos", [0.1, 0.1]))
BENCH_LIP = LipschitzData(0.1, 0.1, 0.1, 0.1)
BENCH_BETA = np.array([0.5])
BENCH_F = lambda x, y: 0.1 * math.sin(y)
BENCH_G = lambda x, y: 0.1 * math.cos(x)


def bench_solve(n_steps, tol=1e-10, theta=0.0, x_guess=None):
    return perov_solve_semi(
        BENCH_P, BENCH_S, BENCH_PAIR, BENCH_LIP, BENCH_BETA,
        TimeGrid(1.0, n_steps), SolverConfig(theta=theta, tol=tol), x_guess=x_guess,
    )


def test_criterion_01_matrix_calculus_equivalence():
    with criterion(1, "matrix calculus equivalence"):
        start = time.perf_counter()
        rng = np.random.default_rng(2024)
        disagreements = 0
        checked = 0
        for _ in range(10_000):
            m = NonnegMatrix2(*rng.uniform(0.0, 2.0, size=4))
            rho = spectral_radius(m)
            if abs(rho - 1.0) < 1e-9:
                continue
            checked += 1
            by_lemma = is_convergent_to_zero(m)
            try:
                inv = inverse_I_minus(m)
                by_inverse = min(inv.a11, inv.a12, inv.a21, inv.a22) >= 0.0
            except SingularOrNotConvergent:
                by_inverse = False
            if not (by_lemma == (rho < 1.0) == by_inverse):
                disagreements += 1
        elapsed = time.perf_counter() - start
        assert disagreements == 0
        assert checked > 9000
        assert elapsed < 1.0, f"took {elapsed:.3f} s"


def test_criterion_02_theta_window_soundness():
    with criterion(2, "theta-window soundness"):
        start = time.perf_counter()
        c = ThetaCoefficients(0.3, 0.7, 0.1, 0.9, T=1.0)
        assert abs(eval_h(c, 0.0)) < 1e-13
        res = find_theta(c)
        assert res.status is ThetaStatus.WINDOW
        lo, hi = res.window
        for theta in np.linspace(lo, hi, 102)[1:-1]:
            assert eval_h(c, theta) < 0.0
            assert spectral_radius(m_theta(c, theta)) < 1.0
        res_inf = find_theta(ThetaCoefficients(0.9, 1.0, 1.0, 0.9, T=1.0))
        assert res_inf.status is ThetaStatus.INFEASIBLE
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"took {elapsed:.3f} s"


def test_criterion_03_closed_form_fidelity():
    with criterion(3, "closed-form fidelity"):
        p = ProblemParams(a=2.0, b=3.0, k=1.0, T=1.0)
        nl = make_nonlinearity("zero", [])
        x, y, report = perov_solve_semi(
            p, ScalarExp(lam=0.0, T=1.0), pointwise_pair(nl), scalar_lipschitz_data(nl),
            np.array([1.0]), TimeGrid(1.0, 128), SolverConfig(tol=1e-13),
        )
        # analytic value x(0) = k (b - 1) beta / (a - 1) = 2
        assert np.max(np.abs(x.values - 2.0)) < 1e-10
        assert np.max(np.abs(y.values - 1.0)) == 0.0
        assert report.defect < 1e-12


def test_criterion_04_oracle_equivalence_scalar():
    with criterion(4, "oracle equivalence (scalar)"):
        start = time.perf_counter()
        x0_star = shoot_semi_x0(-1.0, BENCH_F, BENCH_G, 2.0, 1.0, 1.0, 1.0, 0.5)
        x, _, _ = bench_solve(1024, tol=1e-12)
        rel = abs(x.values[0, 0] - x0_star) / abs(x0_star)
        assert rel <= 1e-6, f"relative error {rel:.3e}"
        errors = []
        for n in (256, 512, 1024):
            xs, _, _ = bench_solve(n, tol=1e-13)
            errors.append(abs(xs.values[0, 0] - x0_star))
        for coarse, fine in zip(errors, errors[1:]):
            assert math.log2(coarse / fine) >= 1.8
        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"took {elapsed:.3f} s"


def test_criterion_05_perov_rate_certificate():
    with criterion(5, "Perov rate certificate"):
        _, _, report = bench_solve(1024, tol=1e-10)
        M = build_M_semi(BENCH_P, BENCH_LIP, 1.0, 0.0)
        rho = spectral_radius(M)
        bound_matrix = M.as_array() + 0.05 * rho * np.eye(2)
        hist = report.residual_history
        assert len(hist) >= 6
        for m in range(3, len(hist) - 1):
            bound = bound_matrix @ np.array(hist[m])
            assert np.all(np.array(hist[m + 1]) <= bound), f"violated at sweep {m}"


def test_criterion_06_controllability_defect():
    with criterion(6, "controllability defect"):
        tol = 1e-10
        # semi-observability
        _, _, rep_semi = bench_solve(256, tol=tol)
        assert rep_semi.defect <= 100 * tol
        # observability
        obs_p = ProblemParams(a=1.0, b=1.0, k=1.0, T=1.0)
        *_, rep_obs = observability_solve(
            obs_p, BENCH_S, BENCH_PAIR, LipschitzData(0.1, 0.1, 0.1, 0.1),
            TimeGrid(1.0, 128), SolverConfig(tol=tol), np.array([0.3]), np.array([-0.2]),
        )
        assert rep_obs.defect <= 100 * tol
        # diffusion demo
        beta = np.zeros(16)
        beta[0] = 1.0
        dcfg = DiffusionConfig(
            L=1.0, n_modes=16, n_quad=64, nu=1.0,
            nonlinearity=make_nonlinearity("sin-cos", [0.05, 0.05]),
            problem=ProblemParams(a=2.0, b=3.0, k=1.0, T=1.0), beta_profile=beta,
        )
        *_, rep_demo = run_demo(dcfg, TimeGrid(1.0, 128), SolverConfig(tol=tol))
        assert rep_demo.defect <= 100 * tol

        # Grid refinement: the defect of the returned initial data under
        # accurate re-integration of the dynamics halves by >= 3.5x per
        # n_steps doubling (the on-grid defect telescopes to rounding level
        # by construction, so the continuous-problem defect is what refines).
        true_defects = []
        for n in (128, 256, 512):
            x, y, _ = bench_solve(n, tol=1e-13)
            xs, ys = rk4_pair(-1.0, BENCH_F, BENCH_G, x.values[0, 0], y.values[0, 0], 1.0, 8192)
            true_defects.append(abs(xs[-1] - 2.0 * xs[0] - (ys[-1] - 0.5)))
        for coarse, fine in zip(true_defects, true_defects[1:]):
            assert coarse / fine >= 3.5


def test_criterion_07_localization():
    with criterion(7, "growth-regime localization"):
        beta = np.zeros(8)
        beta[0] = 0.5
        dcfg = DiffusionConfig(
            L=1.0, n_modes=8, n_quad=32, nu=1.0,
            nonlinearity=make_nonlinearity("logistic", [0.2, 0.2]),
            problem=ProblemParams(a=2.0, b=1.0, k=1.0, T=1.0), beta_profile=beta,
        )
        assert dcfg.nonlinearity.condition == "c2"
        x, y, report = run_demo(dcfg, TimeGrid(1.0, 128), SolverConfig())
        assert report.radii is not None
        r1, r2 = report.radii
        assert verify_localization(x, y, r1, r2, report.theta)


def test_criterion_08_uniqueness():
    with criterion(8, "uniqueness under Lipschitz data"):
        tol = 1e-11
        solutions = []
        for guess in (np.array([0.0]), 10.0 * BENCH_BETA):
            x, y, _ = bench_solve(256, tol=tol, x_guess=guess)
            solutions.append((x.values, y.values))
        dx = np.max(np.abs(solutions[0][0] - solutions[1][0]))
        dy = np.max(np.abs(solutions[0][1] - solutions[1][1]))
        assert dx <= 100 * tol and dy <= 100 * tol


def test_criterion_09_theta_independence():
    with criterion(9, "theta independence of the fixed point"):
        tol = 1e-12
        coeffs = semi_theta_coefficients(BENCH_P, BENCH_LIP, 1.0)
        res = find_theta(coeffs)
        # This problem certifies already at theta = 0, where the sampled
        # spectral radius is also minimal; the h-minimizer provides a
        # genuinely different certified exponent.
        theta_alt = res.theta_best if res.theta_best else res.theta_argmin
        assert theta_alt > 0.01
        assert eval_h(coeffs, theta_alt) < 0.0
        x0, y0, rep0 = bench_solve(256, tol=tol, theta=0.0)
        x1, y1, rep1 = bench_solve(256, tol=tol, theta=theta_alt)
        assert rep0.converged and rep1.converged
        assert np.max(np.abs(x0.values - x1.values)) <= 100 * tol
        assert np.max(np.abs(y0.values - y1.values)) <= 100 * tol


def test_criterion_10_diffusion_demo():
    with criterion(10, "diffusion demo"):
        start = time.perf_counter()
        problem = ProblemParams(a=2.0, b=3.0, k=1.0, T=1.0)
        beta = np.zeros(32)
        beta[0] = 1.0
        grid = TimeGrid(1.0, 512)
        zero_cfg = DiffusionConfig(
            L=1.0, n_modes=32, n_quad=128, nu=1.0,
            nonlinearity=make_nonlinearity("zero", []), problem=problem, beta_profile=beta,
        )
        x, y, _ = run_demo(zero_cfg, grid, SolverConfig(tol=1e-12))
        sigma = math.exp(-math.pi**2)
        assert abs(x.values[0, 0] - (3.0 - sigma) / (2.0 - sigma)) <= 1e-10
        nl_cfg = DiffusionConfig(
            L=1.0, n_modes=32, n_quad=128, nu=1.0,
            nonlinearity=make_nonlinearity("sin-cos", [0.05, 0.05]),
            problem=problem, beta_profile=beta,
        )
        _, _, report = run_demo(nl_cfg, grid, SolverConfig())
        assert report.converged
        assert report.defect <= 1e-8
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0, f"took {elapsed:.3f} s"


def test_criterion_11_observability_existence(tmp_path):
    with criterion(11, "observability existence and honest failure"):
        # nominal path: a = b = k = 1 keeps the outer map non-expansive
        # since e^{-1} < 2/(1/a + 1/b) = 1
        p = ProblemParams(a=1.0, b=1.0, k=1.0, T=1.0)
        tol = 1e-10
        grid = TimeGrid(1.0, 256)
        alpha, beta, x, y, report = observability_solve(
            p, BENCH_S, BENCH_PAIR, LipschitzData(0.1, 0.1, 0.1, 0.1), grid,
            SolverConfig(tol=tol), np.array([0.3]), np.array([-0.2]),
        )
        assert report.converged
        assert report.defect <= 100 * tol
        assert control_defect(p, x, y) == report.defect
        # discrete mild-solution identity for both components
        Fv = Trajectory(grid, 0.1 * np.sin(y.values))
        Gv = Trajectory(grid, 0.1 * np.cos(x.values))
        for i in (0, 100, 256):
            t = grid.nodes[i]
            rx = x.values[i] - (math.exp(-t) * alpha + conv(BENCH_S, Fv, i))
            ry = y.values[i] - (math.exp(-t) * beta + conv(BENCH_S, Gv, i))
            assert abs(rx[0]) < 1e-9 and abs(ry[0]) < 1e-9

        # adversarial path: undamped relaxation with Lipschitz data at the
        # certification edge and the |S(T)| threshold violated -> exit 3 and
        # an intact residual history in the machine report
        cfg_text = """
schema_version = 1
command = "solve-observe"

[problem]
a = 0.25
b = 0.25
k = 1.0
T = 1.0

[semigroup]
kind = "scalar"
lambda = -1.0

[nonlinearity]
name = "sin-cos"
params = [0.1, 0.1]

[solver]
relaxation = 1.0
max_iter = 40

[grid]
n_steps = 32

[alpha0]
value = 0.1
"""
        cfg_file = tmp_path / "adversarial.toml"
        cfg_file.write_text(cfg_text)
        out = tmp_path / "out"
        proc = subprocess.run(
            [sys.executable, "-m", "mutualctl.cli", "--config", str(cfg_file), "--out", str(out)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 3
        kv = dict(
            line.partition("=")[::2]
            for line in (out / "report.kv").read_text().splitlines()
        )
        assert kv["error_class"] == "OuterNotConverged"
        history_keys = [k for k in kv if k.startswith("residual_history.")]
        assert len(history_keys) == 2 * 40
