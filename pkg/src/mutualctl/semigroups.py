"""C0-semigroup representations S(t) acting on finite coordinate vectors.

Three concrete realizations share one interface:

* ScalarExp(lam): X = R, S(t) v = e^{lam t} v.
* MatrixExp(A):   X = R^n, S(t) v = exp(tA) v via dense scaling-and-squaring.
* Heat1D(L, n_modes, nu): spectral truncation of the Dirichlet heat semigroup
  on (0, L); coordinates are coefficients in the orthonormal sine basis
  sqrt(2/L) sin(k pi x / L), with rates lam_k = -nu (k pi / L)^2, so S(t) is
  diagonal and exact (all discretization error lives in time quadrature).

Every spec carries the problem horizon T; semigroup evaluations are
restricted to the window [0, 2T] on which the uniform bound C_A is defined
(operators may evaluate S at t + T).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.linalg import expm

from .errors import DimensionMismatch, TimeOutOfRange

__all__ = [
    "ScalarExp",
    "MatrixExp",
    "Heat1D",
    "SemigroupSpec",
    "dim",
    "is_compact",
    "apply",
    "norm_X",
    "bound_CA",
    "norm_S_at",
    "propagator_table",
    "step_propagator",
    "apply_table",
]


@dataclass(frozen=True)
class ScalarExp:
    """One-dimensional semigroup e^{lam t} with horizon T."""

    lam: float
    T: float

    def __post_init__(self):
        if not self.T > 0.0:
            raise ValueError("horizon T must be positive")


@dataclass(frozen=True, eq=False)
class MatrixExp:
    """Dense semigroup exp(tA) for a real n x n matrix A, horizon T.

    Matrix exponentials are computed by scipy's scaling-and-squaring `expm`
    and memoized per evaluation time.
    """

    A: np.ndarray
    T: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A must be a square matrix")
        if not self.T > 0.0:
            raise ValueError("horizon T must be positive")
        object.__setattr__(self, "A", A)

    def expm_at(self, t: float) -> np.ndarray:
        key = float(t)
        hit = self._cache.get(key)
        if hit is None:
            hit = expm(key * self.A)
            self._cache[key] = hit
        return hit


@dataclass(frozen=True)
class Heat1D:
    """Spectral Dirichlet heat semigroup on (0, L) truncated to n_modes sine modes."""

    L: float
    n_modes: int
    nu: float
    T: float

    def __post_init__(self):
        if not (self.L > 0.0 and self.nu > 0.0 and self.T > 0.0):
            raise ValueError("L, nu and T must be positive")
        if self.n_modes < 1:
            raise ValueError("n_modes must be a positive integer")

    @property
    def rates(self) -> np.ndarray:
        k = np.arange(1, self.n_modes + 1, dtype=float)
        return -self.nu * (k * np.pi / self.L) ** 2


SemigroupSpec = Union[ScalarExp, MatrixExp, Heat1D]


def dim(S: SemigroupSpec) -> int:
    if isinstance(S, ScalarExp):
        return 1
    if isinstance(S, MatrixExp):
        return S.A.shape[0]
    return S.n_modes


def is_compact(S: SemigroupSpec) -> bool:
    """All realizations are finite rank (Heat1D truncation included)."""
    return True


def _check_time(S: SemigroupSpec, t: float) -> float:
    # Allow a relative slack so that grid arithmetic t_i + T == 2T passes.
    upper = 2.0 * S.T
    if t < -1e-15 or t > upper * (1.0 + 1e-12) + 1e-15:
        raise TimeOutOfRange(f"t={t} outside the bound window [0, {upper}]")
    return max(t, 0.0)


def _check_dim(S: SemigroupSpec, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (dim(S),):
        raise DimensionMismatch(f"expected vector of length {dim(S)}, got shape {v.shape}")
    return v


def apply(S: SemigroupSpec, t: float, v) -> np.ndarray:
    """S(t) v for 0 <= t <= 2T."""
    t = _check_time(S, t)
    v = _check_dim(S, v)
    if isinstance(S, ScalarExp):
        return np.exp(S.lam * t) * v
    if isinstance(S, Heat1D):
        return np.exp(S.rates * t) * v
    return S.expm_at(t) @ v


def norm_X(S: SemigroupSpec, v) -> float:
    """The state-space norm |v|_X: Euclidean on coordinates.

    For Heat1D this is the L2(0, L) norm by Parseval in the orthonormal
    sine basis.
    """
    return float(np.linalg.norm(_check_dim(S, v)))


def bound_CA(S: SemigroupSpec) -> float:
    """Upper bound C_A >= 1 for |S(t)| over t in [0, 2T].

    Heat1D is a contraction semigroup, so C_A = 1 exactly.  MatrixExp uses
    the maximum 2-norm over a 256-point grid with a 1.01 safety factor
    (grid sampling may under-estimate between nodes).
    """
    if isinstance(S, ScalarExp):
        return max(1.0, float(np.exp(2.0 * S.lam * S.T)))
    if isinstance(S, Heat1D):
        return 1.0
    cached = S._cache.get("bound_CA")
    if cached is None:
        ts = np.linspace(0.0, 2.0 * S.T, 256)
        cached = 1.01 * max(
            float(np.linalg.norm(S.expm_at(t), ord=2)) for t in ts
        )
        S._cache["bound_CA"] = cached
    return cached


def norm_S_at(S: SemigroupSpec, t: float) -> float:
    """Operator norm |S(t)| in L(X)."""
    t = _check_time(S, t)
    if isinstance(S, ScalarExp):
        return float(np.exp(S.lam * t))
    if isinstance(S, Heat1D):
        return float(np.exp(S.rates[0] * t))
    return float(np.linalg.norm(S.expm_at(t), ord=2))


# ---------------------------------------------------------------------------
# Vectorized propagator tables used by the solvers.  A table is either an
# (n, d) array of diagonal factors (ScalarExp, Heat1D) or an (n, d, d) stack
# of dense exponentials (MatrixExp); apply_table dispatches on ndim.
# ---------------------------------------------------------------------------


def propagator_table(S: SemigroupSpec, times: np.ndarray) -> np.ndarray:
    """S(t) for each t in `times`, in the cheapest faithful representation."""
    times = np.asarray(times, dtype=float)
    for t in (times[0], times[-1]):
        _check_time(S, t)
    if isinstance(S, ScalarExp):
        return np.exp(S.lam * times)[:, None]
    if isinstance(S, Heat1D):
        return np.exp(np.outer(times, S.rates))
    return np.stack([S.expm_at(t) for t in times])


def step_propagator(S: SemigroupSpec, dt: float) -> np.ndarray:
    """S(dt) as diagonal factors (d,) or a dense (d, d) matrix."""
    if isinstance(S, ScalarExp):
        return np.array([np.exp(S.lam * dt)])
    if isinstance(S, Heat1D):
        return np.exp(S.rates * dt)
    return S.expm_at(dt)


def apply_table(table: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rows S(t_i) v for a single vector v; returns an (n, d) array."""
    if table.ndim == 2:
        return table * np.asarray(v, dtype=float)[None, :]
    return np.einsum("tij,j->ti", table, np.asarray(v, dtype=float))
