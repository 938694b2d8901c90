"""Reaction-diffusion application on (0, L) with homogeneous Dirichlet walls.

The two-species system

    u_t = nu * u_xx + f(u, v),
    v_t = nu * v_xx + g(u, v),    u = v = 0 on the boundary,

is reduced to coordinates in the orthonormal sine basis, where the heat
semigroup is diagonal and exact.  The reaction terms act by superposition:
synthesize the fields on a uniform interior collocation grid, apply the
scalar function pointwise, and project back onto the first n_modes modes.
The interior-point rectangle rule is the discrete sine transform, so
synthesis followed by projection is the identity on resolved modes, and
n_quad >= 2 n_modes keeps products of resolved modes alias-free.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from . import semigroups as sg
from .errors import DimensionMismatch, InvalidCoefficients, MatrixNotConvergent
from .matrices import ThetaStatus, eval_h, find_theta
from .nonlinearities import ScalarNonlinearity
from .solvers import (
    LipschitzData,
    NonlinearPair,
    ProblemParams,
    SolveReport,
    SolverConfig,
    avramescu_solve_semi,
    perov_solve_semi,
    schauder_solve_semi,
    semi_theta_coefficients,
)
from .trajectories import TimeGrid, Trajectory, write_csv

__all__ = [
    "DiffusionConfig",
    "superpose",
    "derive_constants",
    "heat_semigroup",
    "superposition_pair",
    "run_demo",
    "write_norms_csv",
]


@dataclass(frozen=True)
class DiffusionConfig:
    """Spatial discretization and problem data for the diffusion demo."""

    L: float
    n_modes: int
    n_quad: int
    nu: float
    nonlinearity: ScalarNonlinearity
    problem: ProblemParams
    beta_profile: np.ndarray

    def __post_init__(self):
        if not (self.L > 0.0 and self.nu > 0.0):
            raise ValueError("L and nu must be positive")
        if self.n_modes < 1:
            raise ValueError("n_modes must be a positive integer")
        if self.n_quad < 2 * self.n_modes:
            raise ValueError("n_quad must be at least 2 * n_modes (anti-aliasing)")
        beta = np.asarray(self.beta_profile, dtype=float)
        if beta.shape != (self.n_modes,):
            raise DimensionMismatch(
                f"beta_profile must have shape ({self.n_modes},), got {beta.shape}"
            )
        object.__setattr__(self, "beta_profile", beta)

    @cached_property
    def _basis(self) -> Tuple[np.ndarray, float]:
        """Synthesis matrix B[q, k] = sqrt(2/L) sin((k+1) pi x_q / L) and weight.

        With x_q = (q+1) L / (n_quad+1) and weight L/(n_quad+1), the projection
        (weight * B^T) is the exact inverse of synthesis on resolved modes.
        """
        x = np.arange(1, self.n_quad + 1) * self.L / (self.n_quad + 1)
        k = np.arange(1, self.n_modes + 1)
        B = np.sqrt(2.0 / self.L) * np.sin(np.outer(x, k * np.pi / self.L))
        return B, self.L / (self.n_quad + 1)


def superpose(cfg: DiffusionConfig, which: str, u, v) -> np.ndarray:
    """Coefficients of f(u(x), v(x)) (which="f") or g (which="g").

    u, v are sine-coefficient vectors; the scalar function is applied on the
    collocation grid and the result projected back onto the first n_modes
    modes.
    """
    if which not in ("f", "g"):
        raise ValueError("which must be 'f' or 'g'")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (cfg.n_modes,) or v.shape != (cfg.n_modes,):
        raise DimensionMismatch(f"coefficient vectors must have shape ({cfg.n_modes},)")
    B, w = cfg._basis
    fun = cfg.nonlinearity.f if which == "f" else cfg.nonlinearity.g
    values = fun(B @ u, B @ v)
    return w * (B.T @ values)


def superposition_pair(cfg: DiffusionConfig) -> NonlinearPair:
    """The nonlinear pair (F, G) acting on coefficient vectors, with a
    batched path that superposes whole trajectories in two matrix products."""
    B, w = cfg._basis
    nl = cfg.nonlinearity

    def lift_rows(fun):
        def rows(U, V):
            ug = np.asarray(U, dtype=float) @ B.T
            vg = np.asarray(V, dtype=float) @ B.T
            return w * (fun(ug, vg) @ B)

        return rows

    F_rows = lift_rows(nl.f)
    G_rows = lift_rows(nl.g)
    return NonlinearPair(
        F=lambda u, v: superpose(cfg, "f", u, v),
        G=lambda u, v: superpose(cfg, "g", u, v),
        F_rows=F_rows,
        G_rows=G_rows,
        h_bounded=nl.bounded,
    )


def derive_constants(cfg: DiffusionConfig) -> LipschitzData:
    """Lift the scalar constants to the function-space level.

    Lipschitz/growth coefficients survive superposition unchanged; the
    growth offsets pick up the factor m(Omega)^{1/2} = sqrt(L) because they
    bound constant functions in the L2 norm.
    """
    nl = cfg.nonlinearity
    mode = {"c1": "lipschitz", "c2": "growth", "c3": "mixed"}[nl.condition]
    root = np.sqrt(cfg.L)
    return LipschitzData(
        a11=nl.a11,
        a12=nl.a12,
        a21=nl.a21,
        a22=nl.a22,
        g13=nl.c_f * root,
        g23=nl.c_g * root,
        mode=mode,
    )


def heat_semigroup(cfg: DiffusionConfig) -> sg.Heat1D:
    return sg.Heat1D(L=cfg.L, n_modes=cfg.n_modes, nu=cfg.nu, T=cfg.problem.T)


def _certified_theta(cfg: DiffusionConfig, lip: LipschitzData, cfg_s: SolverConfig) -> float:
    """Keep cfg_s.theta if it already certifies; otherwise search for one.

    Raises MatrixNotConvergent when certify is requested and no theta works.
    """
    coeffs = None
    try:
        coeffs = semi_theta_coefficients(cfg.problem, lip, C_A=1.0)
        if eval_h(coeffs, cfg_s.theta) < 0.0:
            return cfg_s.theta
        res = find_theta(coeffs)
        if res.status is ThetaStatus.CONVERGENT_AT_ZERO:
            return 0.0
        if res.status is ThetaStatus.WINDOW and res.theta_best is not None:
            return res.theta_best
    except InvalidCoefficients:
        pass
    if cfg_s.certify:
        raise MatrixNotConvergent(
            "no theta certifies the diffusion problem's contraction matrix"
        )
    return cfg_s.theta


def run_demo(
    cfg: DiffusionConfig,
    grid: TimeGrid,
    cfg_s: SolverConfig,
    out_dir: Optional[Path] = None,
) -> Tuple[Trajectory, Trajectory, SolveReport]:
    """Solve the diffusion system under the declared condition class.

    Dispatch: c1 -> Perov iteration (unique solution), c2 -> growth-regime
    Picard with invariance radii, c3 -> alternating scheme (unique in v,
    localized).  When out_dir is given, writes x.csv / y.csv (coefficient
    trajectories) and norms.csv (L2 norms over time plus the running defect).
    """
    lip = derive_constants(cfg)
    S = heat_semigroup(cfg)
    FG = superposition_pair(cfg)
    theta = _certified_theta(cfg, lip, cfg_s)
    cfg_s = replace(cfg_s, theta=theta)
    beta = cfg.beta_profile
    if cfg.nonlinearity.condition == "c1":
        x, y, report = perov_solve_semi(cfg.problem, S, FG, lip, beta, grid, cfg_s)
    elif cfg.nonlinearity.condition == "c2":
        x, y, report = schauder_solve_semi(cfg.problem, S, FG, lip, beta, grid, cfg_s)
    else:
        x, y, report = avramescu_solve_semi(cfg.problem, S, FG, lip, beta, grid, cfg_s)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_csv(x, out_dir / "x.csv")
        write_csv(y, out_dir / "y.csv")
        write_norms_csv(cfg.problem, x, y, out_dir / "norms.csv")
    return x, y, report


def write_norms_csv(p: ProblemParams, x: Trajectory, y: Trajectory, path) -> None:
    """Columns t, u_L2, v_L2, defect_running; the last row's defect_running is
    the controllability defect itself."""
    nx = np.linalg.norm(x.values, axis=1)
    ny = np.linalg.norm(y.values, axis=1)
    running = np.linalg.norm(
        x.values - p.a * x.values[0] - p.k * (y.values - p.b * y.values[0]),
        axis=1,
    )
    with open(path, "w", newline="\n") as fh:
        fh.write("t,u_L2,v_L2,defect_running\n")
        for t, a_, b_, c_ in zip(x.grid.nodes, nx, ny, running):
            fh.write(",".join("%.17g" % v for v in (t, a_, b_, c_)) + "\n")
