"""Config-driven command-line driver.

Configuration is a TOML document with `schema_version = 1`, a `command`, and
optional sections `[problem]`, `[lipschitz]`, `[semigroup]`, `[grid]`,
`[solver]`, `[nonlinearity]`, `[beta]`, `[alpha0]`, `[beta0]`, `[diffusion]`,
`[sweep]`.  Unknown keys are rejected (strict schema).  Outputs are written
to the --out directory: report.txt (human), report.kv (machine key-value),
and per command x.csv / y.csv / norms.csv / sweep.csv.

Exit codes: 0 success, 2 certified-infeasible (including invalid
configuration), 3 non-convergence.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import semigroups as sg
from .diffusion import DiffusionConfig, run_demo
from .errors import (
    InnerNotContractive,
    InvalidCoefficients,
    MatrixNotConvergent,
    MaxIterExceeded,
    MutualControlError,
    OuterNotConverged,
    RangeError,
    SchemaError,
)
from .matrices import (
    NonnegMatrix2,
    ThetaCoefficients,
    ThetaStatus,
    eval_h,
    find_theta,
    inverse_I_minus,
    is_convergent_to_zero,
    spectral_radius,
)
from .nonlinearities import (
    ScalarNonlinearity,
    make_nonlinearity,
    pointwise_pair,
    scalar_lipschitz_data,
)
from .solvers import (
    LipschitzData,
    ProblemParams,
    SolverConfig,
    avramescu_solve_semi,
    build_M_semi,
    observability_solve,
    perov_solve_semi,
    report_kv_lines,
    schauder_solve_semi,
    semi_theta_coefficients,
)
from .trajectories import TimeGrid, Trajectory, write_csv
from .diffusion import write_norms_csv

COMMANDS = (
    "analyze-matrix",
    "find-theta",
    "solve-semi",
    "solve-observe",
    "demo-diffusion",
    "sweep-theta",
    "self-test",
)

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_NOT_CONVERGED = 3


@dataclass
class RunConfig:
    command: str
    problem: ProblemParams
    lipschitz: Optional[LipschitzData]
    nonlinearity: ScalarNonlinearity
    solver: SolverConfig
    n_steps: int
    semigroup_kind: str
    scalar_lambda: float
    a_matrix: Optional[np.ndarray]
    beta: Optional[np.ndarray]
    alpha0: Optional[np.ndarray]
    beta0: Optional[np.ndarray]
    diffusion_L: float
    diffusion_n_modes: int
    diffusion_n_quad: int
    diffusion_nu: float
    sweep_range: Tuple[float, float]
    sweep_samples: int
    output_dir: Optional[str]


# --------------------------------------------------------------------------
# Strict schema validation
# --------------------------------------------------------------------------

_SECTIONS = {
    "problem": {"a", "b", "k", "T"},
    "lipschitz": {"a11", "a12", "a21", "a22", "g13", "g23", "mode"},
    "semigroup": {"kind", "lambda", "a_matrix"},
    "grid": {"n_steps"},
    "solver": {"theta", "tol", "max_iter", "relaxation", "certify", "c1_with_T"},
    "nonlinearity": {"name", "params"},
    "beta": {"value", "coeffs"},
    "alpha0": {"value", "coeffs"},
    "beta0": {"value", "coeffs"},
    "diffusion": {"L", "n_modes", "n_quad", "nu"},
    "sweep": {"theta_min", "theta_max", "samples"},
}
_TOP_KEYS = {"schema_version", "command", "output_dir"} | set(_SECTIONS)


def _require_number(doc: dict, section: str, key: str, default, positive=False, nonneg=False):
    raw = doc.get(key, default)
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise RangeError(f"{section}.{key} must be a number")
    val = float(raw)
    if positive and not val > 0.0:
        raise RangeError(f"{section}.{key} must be > 0, got {val}")
    if nonneg and not val >= 0.0:
        raise RangeError(f"{section}.{key} must be >= 0, got {val}")
    return val


def _require_int(doc: dict, section: str, key: str, default, minimum=1):
    raw = doc.get(key, default)
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise RangeError(f"{section}.{key} must be an integer")
    if raw < minimum:
        raise RangeError(f"{section}.{key} must be >= {minimum}, got {raw}")
    return raw


def _require_bool(doc: dict, section: str, key: str, default):
    raw = doc.get(key, default)
    if not isinstance(raw, bool):
        raise RangeError(f"{section}.{key} must be a boolean")
    return raw


def _check_keys(doc: dict):
    for key in doc:
        if key not in _TOP_KEYS:
            raise SchemaError(f"unknown key: {key}")
    for section, allowed in _SECTIONS.items():
        sub = doc.get(section, {})
        if not isinstance(sub, dict):
            raise SchemaError(f"section [{section}] must be a table")
        for key in sub:
            if key not in allowed:
                raise SchemaError(f"unknown key: {section}.{key}")


def _state_vector(doc: dict, section: str) -> Optional[np.ndarray]:
    sub = doc.get(section, {})
    if "value" in sub and "coeffs" in sub:
        raise SchemaError(f"section [{section}] must give either value or coeffs, not both")
    if "value" in sub:
        return np.array([_require_number(sub, section, "value", None)])
    if "coeffs" in sub:
        coeffs = sub["coeffs"]
        if not isinstance(coeffs, list) or not coeffs:
            raise RangeError(f"{section}.coeffs must be a nonempty list of numbers")
        try:
            return np.array([float(c) for c in coeffs])
        except (TypeError, ValueError):
            raise RangeError(f"{section}.coeffs must be a list of numbers") from None
    return None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a TOML configuration document."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SchemaError(f"malformed TOML: {exc}") from None
    return _config_from_dict(doc)


def _config_from_dict(doc: dict) -> RunConfig:
    _check_keys(doc)

    version = doc.get("schema_version")
    if version != 1:
        raise SchemaError(f"schema_version must be 1, got {version!r}")
    command = doc.get("command")
    if command not in COMMANDS:
        raise SchemaError(f"command must be one of {', '.join(COMMANDS)}; got {command!r}")

    prob = doc.get("problem", {})
    try:
        problem = ProblemParams(
            a=_require_number(prob, "problem", "a", 1.0, positive=True),
            b=_require_number(prob, "problem", "b", 1.0, positive=True),
            k=_require_number(prob, "problem", "k", 1.0, positive=True),
            T=_require_number(prob, "problem", "T", 1.0, positive=True),
        )
    except ValueError as exc:
        raise RangeError(f"problem: {exc}") from None

    nl_doc = doc.get("nonlinearity", {})
    name = nl_doc.get("name", "zero")
    if not isinstance(name, str):
        raise SchemaError("nonlinearity.name must be a string")
    params = nl_doc.get("params", [])
    if not isinstance(params, list):
        raise SchemaError("nonlinearity.params must be a list of numbers")
    nonlinearity = make_nonlinearity(name, [float(p) for p in params])

    lipschitz = None
    lip_doc = doc.get("lipschitz", {})
    if lip_doc:
        mode = lip_doc.get("mode", "lipschitz")
        if mode not in ("lipschitz", "growth", "mixed"):
            raise RangeError("lipschitz.mode must be lipschitz, growth or mixed")
        lipschitz = LipschitzData(
            a11=_require_number(lip_doc, "lipschitz", "a11", 0.0, nonneg=True),
            a12=_require_number(lip_doc, "lipschitz", "a12", 0.0, nonneg=True),
            a21=_require_number(lip_doc, "lipschitz", "a21", 0.0, nonneg=True),
            a22=_require_number(lip_doc, "lipschitz", "a22", 0.0, nonneg=True),
            g13=_require_number(lip_doc, "lipschitz", "g13", 0.0, nonneg=True),
            g23=_require_number(lip_doc, "lipschitz", "g23", 0.0, nonneg=True),
            mode=mode,
        )

    sol = doc.get("solver", {})
    try:
        solver = SolverConfig(
            theta=_require_number(sol, "solver", "theta", 0.0, nonneg=True),
            tol=_require_number(sol, "solver", "tol", 1e-10, positive=True),
            max_iter=_require_int(sol, "solver", "max_iter", 10_000),
            relaxation=_require_number(sol, "solver", "relaxation", 0.5, positive=True),
            certify=_require_bool(sol, "solver", "certify", True),
            c1_with_T=_require_bool(sol, "solver", "c1_with_T", False),
        )
    except ValueError as exc:
        raise RangeError(f"solver: {exc}") from None

    grid_doc = doc.get("grid", {})
    n_steps = _require_int(grid_doc, "grid", "n_steps", 256)

    semi_doc = doc.get("semigroup", {})
    kind = semi_doc.get("kind", "scalar")
    if kind not in ("scalar", "matrix", "heat1d"):
        raise SchemaError("semigroup.kind must be scalar, matrix or heat1d")
    scalar_lambda = _require_number(semi_doc, "semigroup", "lambda", -1.0)
    a_matrix = None
    if "a_matrix" in semi_doc:
        rows = semi_doc["a_matrix"]
        try:
            a_matrix = np.array(rows, dtype=float)
        except (TypeError, ValueError):
            raise RangeError("semigroup.a_matrix must be a square matrix of numbers") from None
        if a_matrix.ndim != 2 or a_matrix.shape[0] != a_matrix.shape[1]:
            raise RangeError("semigroup.a_matrix must be a square matrix of numbers")

    diff_doc = doc.get("diffusion", {})
    diffusion_L = _require_number(diff_doc, "diffusion", "L", 1.0, positive=True)
    diffusion_n_modes = _require_int(diff_doc, "diffusion", "n_modes", 32)
    diffusion_n_quad = _require_int(diff_doc, "diffusion", "n_quad", 4 * diffusion_n_modes)
    diffusion_nu = _require_number(diff_doc, "diffusion", "nu", 1.0, positive=True)

    sweep_doc = doc.get("sweep", {})
    sweep_lo = _require_number(sweep_doc, "sweep", "theta_min", 0.0, nonneg=True)
    sweep_hi = _require_number(sweep_doc, "sweep", "theta_max", 5.0)
    if not sweep_hi > sweep_lo:
        raise RangeError("sweep.theta_max must exceed sweep.theta_min")
    sweep_samples = _require_int(sweep_doc, "sweep", "samples", 64, minimum=2)

    output_dir = doc.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise SchemaError("output_dir must be a string path")

    return RunConfig(
        command=command,
        problem=problem,
        lipschitz=lipschitz,
        nonlinearity=nonlinearity,
        solver=solver,
        n_steps=n_steps,
        semigroup_kind=kind,
        scalar_lambda=scalar_lambda,
        a_matrix=a_matrix,
        beta=_state_vector(doc, "beta"),
        alpha0=_state_vector(doc, "alpha0"),
        beta0=_state_vector(doc, "beta0"),
        diffusion_L=diffusion_L,
        diffusion_n_modes=diffusion_n_modes,
        diffusion_n_quad=diffusion_n_quad,
        diffusion_nu=diffusion_nu,
        sweep_range=(sweep_lo, sweep_hi),
        sweep_samples=sweep_samples,
        output_dir=output_dir,
    )


# --------------------------------------------------------------------------
# Command execution
# --------------------------------------------------------------------------


def _effective_lipschitz(cfg: RunConfig) -> LipschitzData:
    if cfg.lipschitz is not None:
        return cfg.lipschitz
    return scalar_lipschitz_data(cfg.nonlinearity)


def _build_semigroup(cfg: RunConfig):
    if cfg.semigroup_kind == "scalar":
        return sg.ScalarExp(lam=cfg.scalar_lambda, T=cfg.problem.T)
    if cfg.semigroup_kind == "matrix":
        if cfg.a_matrix is None:
            raise SchemaError("semigroup.kind = 'matrix' requires semigroup.a_matrix")
        return sg.MatrixExp(A=cfg.a_matrix, T=cfg.problem.T)
    raise SchemaError("heat1d state spaces are driven by the demo-diffusion command")


def _fit_state(v: Optional[np.ndarray], d: int, section: str) -> np.ndarray:
    if v is None:
        return np.zeros(d)
    if len(v) > d:
        raise RangeError(f"{section} has {len(v)} coefficients but the state dimension is {d}")
    out = np.zeros(d)
    out[: len(v)] = v
    return out


class _Artifacts:
    """Collects report lines and files for one run, then writes them."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.kv: List[str] = []
        self.text: List[str] = []

    def write(self, exit_code: int, command: str):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        head = ["schema_version=1", f"command={command}", f"exit_code={exit_code}"]
        (self.out_dir / "report.kv").write_text("\n".join(head + self.kv) + "\n")
        title = [f"mutualctl report: {command}", "=" * (19 + len(command)), ""]
        (self.out_dir / "report.txt").write_text(
            "\n".join(title + self.text + ["", f"exit code: {exit_code}"]) + "\n"
        )


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    if v is None:
        return "none"
    return str(v)


def _vector_kv(name: str, v: np.ndarray) -> List[str]:
    return [f"{name}.{i}={_fmt(float(x))}" for i, x in enumerate(v)]


def _emit_solution(art: _Artifacts, p, x: Trajectory, y: Trajectory, report):
    write_csv(x, art.out_dir / "x.csv")
    write_csv(y, art.out_dir / "y.csv")
    write_norms_csv(p, x, y, art.out_dir / "norms.csv")
    art.kv += ["status=converged"] + report_kv_lines(report)
    art.text += [
        f"converged in {report.iterations} iterations",
        f"controllability defect: {_fmt(report.defect)} (tolerance {_fmt(report.defect_tol)})",
        f"certificate spectral radius: {_fmt(report.rho)} at theta={_fmt(report.theta)}",
    ]
    if report.radii is not None:
        art.text.append(
            f"localization radii: R1={_fmt(report.radii[0])}, R2={_fmt(report.radii[1])}"
        )
    art.text.append("wrote x.csv, y.csv, norms.csv")


def _emit_failure(art: _Artifacts, exc: MutualControlError) -> int:
    art.kv.append("status=error")
    art.kv.append(f"error_class={type(exc).__name__}")
    art.kv.append(f"error_message={exc}")
    report = getattr(exc, "report", None)
    if report is not None:
        art.kv += report_kv_lines(report)
    art.text.append(f"{type(exc).__name__}: {exc}")
    if isinstance(exc, (MatrixNotConvergent, InnerNotContractive, InvalidCoefficients)):
        return EXIT_INFEASIBLE
    if isinstance(exc, (MaxIterExceeded, OuterNotConverged)):
        return EXIT_NOT_CONVERGED
    return EXIT_INFEASIBLE


def _run_analyze_matrix(cfg: RunConfig, art: _Artifacts) -> int:
    lip = _effective_lipschitz(cfg)
    M = NonnegMatrix2(lip.a11, lip.a12, lip.a21, lip.a22)
    rho = spectral_radius(M)
    conv = is_convergent_to_zero(M)
    art.kv += [f"rho={_fmt(rho)}", f"convergent={_fmt(conv)}"]
    art.text += [
        f"matrix [[{M.a11}, {M.a12}], [{M.a21}, {M.a22}]]",
        f"spectral radius: {_fmt(rho)}",
        f"convergent to zero: {_fmt(conv)}",
    ]
    if conv:
        inv = inverse_I_minus(M)
        art.kv += [
            f"inv_11={_fmt(inv.a11)}",
            f"inv_12={_fmt(inv.a12)}",
            f"inv_21={_fmt(inv.a21)}",
            f"inv_22={_fmt(inv.a22)}",
        ]
        art.text.append(
            f"(I - M)^-1 = [[{_fmt(inv.a11)}, {_fmt(inv.a12)}], [{_fmt(inv.a21)}, {_fmt(inv.a22)}]]"
        )
    return EXIT_OK


def _run_find_theta(cfg: RunConfig, art: _Artifacts) -> int:
    lip = _effective_lipschitz(cfg)
    c = ThetaCoefficients(lip.a11, lip.a12, lip.a21, lip.a22, cfg.problem.T)
    res = find_theta(c)
    art.kv.append(f"status={res.status.value}")
    art.kv.append(f"h_min={_fmt(res.h_min)}")
    art.kv.append(f"theta_argmin={_fmt(res.theta_argmin)}")
    art.kv.append(f"theta_best={_fmt(res.theta_best)}")
    if res.window is not None:
        art.kv.append(f"theta_lo={_fmt(res.window[0])}")
        art.kv.append(f"theta_hi={_fmt(res.window[1])}")
        art.text.append(
            f"Window ({_fmt(res.window[0])}, {_fmt(res.window[1])}) with best theta {_fmt(res.theta_best)}"
        )
    else:
        art.text.append(f"{res.status.value}; h_min={_fmt(res.h_min)} at theta={_fmt(res.theta_argmin)}")
    return EXIT_OK if res.status is not ThetaStatus.INFEASIBLE else EXIT_INFEASIBLE


def _run_solve_semi(cfg: RunConfig, art: _Artifacts) -> int:
    S = _build_semigroup(cfg)
    lip = _effective_lipschitz(cfg)
    FG = pointwise_pair(cfg.nonlinearity)
    beta = _fit_state(cfg.beta, sg.dim(S), "beta")
    grid = TimeGrid(cfg.problem.T, cfg.n_steps)
    if lip.mode == "lipschitz":
        x, y, report = perov_solve_semi(cfg.problem, S, FG, lip, beta, grid, cfg.solver)
    elif lip.mode == "growth":
        x, y, report = schauder_solve_semi(cfg.problem, S, FG, lip, beta, grid, cfg.solver)
    else:
        x, y, report = avramescu_solve_semi(cfg.problem, S, FG, lip, beta, grid, cfg.solver)
    _emit_solution(art, cfg.problem, x, y, report)
    return EXIT_OK


def _run_solve_observe(cfg: RunConfig, art: _Artifacts) -> int:
    S = _build_semigroup(cfg)
    lip = _effective_lipschitz(cfg)
    FG = pointwise_pair(cfg.nonlinearity)
    d = sg.dim(S)
    alpha0 = _fit_state(cfg.alpha0, d, "alpha0")
    beta0 = _fit_state(cfg.beta0, d, "beta0")
    grid = TimeGrid(cfg.problem.T, cfg.n_steps)
    alpha, beta, x, y, report = observability_solve(
        cfg.problem, S, FG, lip, grid, cfg.solver, alpha0, beta0
    )
    _emit_solution(art, cfg.problem, x, y, report)
    art.kv += _vector_kv("alpha_star", alpha) + _vector_kv("beta_star", beta)
    art.text.append(f"recovered initial states: x(0)={alpha}, y(0)={beta}")
    return EXIT_OK


def _run_demo_diffusion(cfg: RunConfig, art: _Artifacts) -> int:
    beta = _fit_state(cfg.beta, cfg.diffusion_n_modes, "beta")
    dcfg = DiffusionConfig(
        L=cfg.diffusion_L,
        n_modes=cfg.diffusion_n_modes,
        n_quad=cfg.diffusion_n_quad,
        nu=cfg.diffusion_nu,
        nonlinearity=cfg.nonlinearity,
        problem=cfg.problem,
        beta_profile=beta,
    )
    grid = TimeGrid(cfg.problem.T, cfg.n_steps)
    x, y, report = run_demo(dcfg, grid, cfg.solver, out_dir=art.out_dir)
    art.kv += ["status=converged"] + report_kv_lines(report)
    art.text += [
        f"condition class {cfg.nonlinearity.condition}: converged in {report.iterations} iterations",
        f"controllability defect: {_fmt(report.defect)}",
        "wrote x.csv, y.csv, norms.csv",
    ]
    if report.radii is not None:
        art.text.append(
            f"localization radii: R1={_fmt(report.radii[0])}, R2={_fmt(report.radii[1])}"
        )
    return EXIT_OK


def _run_sweep_theta(cfg: RunConfig, art: _Artifacts) -> int:
    S = _build_semigroup(cfg)
    lip = _effective_lipschitz(cfg)
    FG = pointwise_pair(cfg.nonlinearity)
    beta = _fit_state(cfg.beta, sg.dim(S), "beta")
    grid = TimeGrid(cfg.problem.T, cfg.n_steps)
    C_A = sg.bound_CA(S)
    coeffs = semi_theta_coefficients(cfg.problem, lip, C_A)
    thetas = np.linspace(cfg.sweep_range[0], cfg.sweep_range[1], cfg.sweep_samples)
    rows = []
    for theta in thetas:
        h = eval_h(coeffs, float(theta))
        rho = spectral_radius(build_M_semi(cfg.problem, lip, C_A, float(theta)))
        scfg = SolverConfig(
            theta=float(theta),
            tol=cfg.solver.tol,
            max_iter=cfg.solver.max_iter,
            relaxation=cfg.solver.relaxation,
            certify=False,
            c1_with_T=cfg.solver.c1_with_T,
        )
        try:
            _, _, report = perov_solve_semi(cfg.problem, S, FG, lip, beta, grid, scfg)
            rows.append((float(theta), h, rho, True, report.iterations, report.defect))
        except MaxIterExceeded as exc:
            rep = exc.report
            rows.append((float(theta), h, rho, False, rep.iterations, rep.defect))
    with open(art.out_dir / "sweep.csv", "w", newline="\n") as fh:
        fh.write("theta,h,rho,converged,iterations,defect\n")
        for theta, h, rho, conv, iters, defect in rows:
            fh.write(
                f"{_fmt(theta)},{_fmt(h)},{_fmt(rho)},{_fmt(conv)},{iters},{_fmt(defect)}\n"
            )
    n_conv = sum(1 for r in rows if r[3])
    art.kv += [f"samples={len(rows)}", f"converged_samples={n_conv}"]
    art.text += [f"swept {len(rows)} theta samples; {n_conv} converged", "wrote sweep.csv"]
    return EXIT_OK


def _run_self_test(cfg: RunConfig, art: _Artifacts) -> int:
    """Closed-form smoke checks; failures exit 3."""
    checks: List[Tuple[str, bool]] = []

    M = NonnegMatrix2(0.5, 0.2, 0.1, 0.3)
    checks.append(("spectral radius closed form", abs(spectral_radius(M) - 0.5732050807568877) < 1e-12))
    checks.append(("trace-determinant contraction test", is_convergent_to_zero(M)))
    inv = inverse_I_minus(M)
    checks.append(("cofactor inverse", abs(inv.a11 - 0.7 / 0.33) < 1e-12))

    p = ProblemParams(a=2.0, b=3.0, k=1.0, T=1.0)
    S = sg.ScalarExp(lam=0.0, T=1.0)
    nl = make_nonlinearity("zero", [])
    x, y, report = perov_solve_semi(
        p, S, pointwise_pair(nl), scalar_lipschitz_data(nl),
        np.array([1.0]), TimeGrid(1.0, 32), SolverConfig(tol=1e-13),
    )
    checks.append(("closed-form fixed point x == 2", abs(x.values[-1, 0] - 2.0) < 1e-9))
    checks.append(("closed-form defect", report.defect < 1e-12))

    ok_all = True
    for name, ok in checks:
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        art.text.append(line)
        print(line)
        ok_all &= ok
    art.kv.append(f"passed={sum(1 for _, ok in checks if ok)}")
    art.kv.append(f"failed={sum(1 for _, ok in checks if not ok)}")
    return EXIT_OK if ok_all else EXIT_NOT_CONVERGED


_RUNNERS = {
    "analyze-matrix": _run_analyze_matrix,
    "find-theta": _run_find_theta,
    "solve-semi": _run_solve_semi,
    "solve-observe": _run_solve_observe,
    "demo-diffusion": _run_demo_diffusion,
    "sweep-theta": _run_sweep_theta,
    "self-test": _run_self_test,
}


def run(cfg: RunConfig, out_dir: Optional[str] = None) -> int:
    """Execute a parsed configuration; returns the process exit code."""
    target = Path(out_dir or cfg.output_dir or "out")
    art = _Artifacts(target)
    art.out_dir.mkdir(parents=True, exist_ok=True)
    try:
        code = _RUNNERS[cfg.command](cfg, art)
    except MutualControlError as exc:
        code = _emit_failure(art, exc)
    art.write(code, cfg.command)
    return code


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------


def _apply_override(doc: dict, spec: str):
    if "=" not in spec:
        raise SchemaError(f"override {spec!r} must look like key=value")
    path, raw = spec.split("=", 1)
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    keys = path.strip().split(".")
    node = doc
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise SchemaError(f"override path {path!r} crosses a non-table value")
    node[keys[-1]] = value


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mutualctl",
        description="Mutual control solver for evolution systems with a "
        "proportionality final condition.",
    )
    parser.add_argument("--config", required=True, help="path to a TOML configuration")
    parser.add_argument("--out", default=None, help="output directory (default from config or ./out)")
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key by dotted path (repeatable)",
    )
    parser.add_argument(
        "--seed", type=int, default=None, help="reserved; all algorithms are deterministic"
    )
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE

    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        print(f"error: malformed TOML: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    try:
        for spec in args.override:
            _apply_override(doc, spec)
        cfg = _config_from_dict(doc)
        return run(cfg, out_dir=args.out)
    except (SchemaError, RangeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
