"""Contraction certificates from 2x2 nonnegative matrices.

A nonnegative square matrix M is *convergent to zero* when M^k -> 0, which is
equivalent to rho(M) < 1 and to (I - M)^{-1} existing with nonnegative
entries.  For 2x2 matrices there is a closed-form test,

    a11 < 1,  a22 < 1  and  tr(M) < 1 + det(M),

and fixed-point solvers use the theta-weighted family

    M(theta) = [[a11, a12 * phi_plus(theta)],
                [a21, a22 * phi_minus(theta)]],

    phi_plus(theta)  = (e^{theta T} - 1) / theta,
    phi_minus(theta) = (1 - e^{-theta T}) / theta,

where theta >= 0 is the exponent of a weighted sup norm and both phi factors
take the limit value T at theta = 0.  M(theta) is convergent to zero exactly
when h(theta) = tr(M(theta)) - 1 - det(M(theta)) < 0, and `find_theta`
locates the h < 0 window on which the contraction is certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .errors import InvalidCoefficients, SingularOrNotConvergent

__all__ = [
    "NonnegMatrix2",
    "ThetaCoefficients",
    "ThetaStatus",
    "ThetaSearchResult",
    "spectral_radius",
    "is_convergent_to_zero",
    "inverse_I_minus",
    "phi_plus",
    "phi_minus",
    "m_theta",
    "eval_h",
    "find_theta",
]


@dataclass(frozen=True)
class NonnegMatrix2:
    """A 2x2 matrix with nonnegative entries (contraction coefficients)."""

    a11: float
    a12: float
    a21: float
    a22: float

    def __post_init__(self):
        for name in ("a11", "a12", "a21", "a22"):
            if not getattr(self, name) >= 0.0:
                raise ValueError(f"entry {name} must be nonnegative, got {getattr(self, name)}")

    def trace(self) -> float:
        return self.a11 + self.a22

    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def as_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]], dtype=float)

    def mul_vec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return np.array(
            [self.a11 * v[0] + self.a12 * v[1], self.a21 * v[0] + self.a22 * v[1]]
        )


@dataclass(frozen=True)
class ThetaCoefficients:
    """Coefficients a_ij >= 0 and horizon T entering M(theta).

    The theta search additionally requires a11 < 1 and a22 < 1/T; those
    preconditions are checked by `find_theta` (raising InvalidCoefficients)
    so that out-of-range data can still be probed with `m_theta`/`eval_h`.
    """

    a11: float
    a12: float
    a21: float
    a22: float
    T: float

    def __post_init__(self):
        for name in ("a11", "a12", "a21", "a22"):
            if not getattr(self, name) >= 0.0:
                raise ValueError(f"coefficient {name} must be nonnegative")
        if not self.T > 0.0:
            raise ValueError("horizon T must be positive")


class ThetaStatus(Enum):
    CONVERGENT_AT_ZERO = "ConvergentAtZero"
    WINDOW = "Window"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class ThetaSearchResult:
    """Outcome of the feasibility search over theta.

    window is the open interval (theta_lo, theta_hi) with h < 0 strictly
    inside; theta_best minimizes the sampled spectral radius of M(theta) over
    the feasible set; h_min and theta_argmin describe the global minimum of h
    over the scanned range regardless of status.
    """

    status: ThetaStatus
    window: Optional[Tuple[float, float]]
    theta_best: Optional[float]
    h_min: float
    theta_argmin: float


def spectral_radius(M: NonnegMatrix2) -> float:
    """Largest eigenvalue modulus from the trace/determinant closed form.

    Eigenvalues are (tr +- sqrt(tr^2 - 4 det)) / 2; a (numerically) negative
    discriminant means a complex pair of modulus sqrt(det).
    """
    tr = M.trace()
    det = M.det()
    disc = tr * tr - 4.0 * det
    if disc < 0.0:
        return math.sqrt(det)
    root = math.sqrt(disc)
    return max(abs(tr + root), abs(tr - root)) / 2.0


def is_convergent_to_zero(M: NonnegMatrix2) -> bool:
    """Closed-form test: a11 < 1, a22 < 1 and tr(M) < 1 + det(M), all strict."""
    return (
        M.a11 < 1.0
        and M.a22 < 1.0
        and M.a11 + M.a22 < 1.0 + M.a11 * M.a22 - M.a12 * M.a21
    )


def inverse_I_minus(M: NonnegMatrix2) -> NonnegMatrix2:
    """(I - M)^{-1} by the 2x2 cofactor formula; requires M convergent to zero.

    For convergent M the inverse has nonnegative entries, which is what makes
    it usable as an amplification bound in the fixed-point estimates.
    """
    if not is_convergent_to_zero(M):
        raise SingularOrNotConvergent(
            "matrix is not convergent to zero; I - M does not certify a contraction"
        )
    det = (1.0 - M.a11) * (1.0 - M.a22) - M.a12 * M.a21
    return NonnegMatrix2(
        (1.0 - M.a22) / det,
        M.a12 / det,
        M.a21 / det,
        (1.0 - M.a11) / det,
    )


# Below theta*T = 1e-6 the exponential differences lose digits to
# cancellation; a second-order Taylor expansion is exact to ~1e-19 there.
_TAYLOR_CUT = 1e-6

# h(0) values inside this band are treated as exactly zero by find_theta:
# the window at an exact boundary is open, and float rounding of O(1)
# coefficients perturbs h(0) by a few 1e-16.
_H_BOUNDARY = 1e-13


def phi_plus(theta: float, T: float) -> float:
    """(e^{theta T} - 1)/theta with the limit value T at theta = 0."""
    x = theta * T
    if x < _TAYLOR_CUT:
        return T * (1.0 + x / 2.0 + x * x / 6.0)
    return math.expm1(x) / theta


def phi_minus(theta: float, T: float) -> float:
    """(1 - e^{-theta T})/theta with the limit value T at theta = 0."""
    x = theta * T
    if x < _TAYLOR_CUT:
        return T * (1.0 - x / 2.0 + x * x / 6.0)
    return -math.expm1(-x) / theta


def m_theta(c: ThetaCoefficients, theta: float) -> NonnegMatrix2:
    """The weighted matrix M(theta); at theta = 0 both phi factors equal T."""
    if theta < 0.0:
        raise ValueError("theta must be nonnegative")
    return NonnegMatrix2(
        c.a11,
        c.a12 * phi_plus(theta, c.T),
        c.a21,
        c.a22 * phi_minus(theta, c.T),
    )


def eval_h(c: ThetaCoefficients, theta: float) -> float:
    """h(theta) = tr(M(theta)) - 1 - det(M(theta)); M(theta) contracts iff h < 0."""
    if theta < 0.0:
        raise ValueError("theta must be nonnegative")
    fp = phi_plus(theta, c.T)
    fm = phi_minus(theta, c.T)
    return c.a11 + c.a22 * fm - 1.0 - c.a11 * c.a22 * fm + c.a12 * c.a21 * fp


def _golden_min(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200):
    """Golden-section minimum of a unimodal scalar function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def _bisect_sign_change(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Bisection boundary between f >= 0 (satisfied at lo) and f < 0 (at hi)."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_theta(
    c: ThetaCoefficients,
    theta_max: Optional[float] = None,
    grid_size: int = 1024,
) -> ThetaSearchResult:
    """Search for theta values making M(theta) convergent to zero.

    If h(0) < 0, M(0) already contracts (status CONVERGENT_AT_ZERO).
    Otherwise h is minimized over [0, theta_max] by a coarse grid scan
    followed by golden-section refinement.  A negative minimum means the
    h < 0 set is an interval; its endpoints are bracketed by bisection to
    1e-10 and returned as an open window (status WINDOW).  If h stays
    nonnegative everywhere the data admits no certificate (INFEASIBLE).

    theta_max defaults to 50/T: for a12*a21 > 0 the phi_plus term grows like
    e^{theta T}/theta, so no window survives much beyond that in double
    precision, while for a12*a21 = 0 the h function is monotone and the
    window is clamped at theta_max.
    """
    if not (c.a11 < 1.0 and c.a22 < 1.0 / c.T):
        raise InvalidCoefficients(
            f"need a11 < 1 and a22 < 1/T, got a11={c.a11}, a22={c.a22}, T={c.T}"
        )
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    if theta_max is None:
        theta_max = 50.0 / c.T
    if not theta_max > 0.0:
        raise ValueError("theta_max must be positive")

    thetas = np.linspace(0.0, theta_max, grid_size)
    h_vals = np.array([eval_h(c, t) for t in thetas])

    # Global minimum of h: grid argmin refined by golden section.
    i_min = int(np.argmin(h_vals))
    lo = thetas[max(i_min - 1, 0)]
    hi = thetas[min(i_min + 1, grid_size - 1)]
    theta_argmin, h_min = _golden_min(lambda t: eval_h(c, t), lo, hi)
    if h_vals[i_min] < h_min:
        theta_argmin, h_min = float(thetas[i_min]), float(h_vals[i_min])

    h0 = eval_h(c, 0.0)

    def best_theta_over(samples: np.ndarray) -> Optional[float]:
        feasible = [t for t in samples if eval_h(c, t) < 0.0]
        if not feasible:
            return None
        rhos = [spectral_radius(m_theta(c, t)) for t in feasible]
        return float(feasible[int(np.argmin(rhos))])

    if h0 < -_H_BOUNDARY:
        return ThetaSearchResult(
            status=ThetaStatus.CONVERGENT_AT_ZERO,
            window=None,
            theta_best=best_theta_over(thetas),
            h_min=float(h_min),
            theta_argmin=float(theta_argmin),
        )

    if h_min >= 0.0:
        return ThetaSearchResult(
            status=ThetaStatus.INFEASIBLE,
            window=None,
            theta_best=None,
            h_min=float(h_min),
            theta_argmin=float(theta_argmin),
        )

    # h(0) >= 0 (up to the boundary band) > h_min: bracket the lower root on
    # [0, theta_argmin].
    theta_lo = _bisect_sign_change(lambda t: eval_h(c, t), 0.0, theta_argmin)

    # Upper root: first grid point beyond the minimum where h is >= 0 again;
    # if h stays negative up to theta_max (monotone a12*a21 = 0 case) the
    # window is clamped there.
    right = None
    for j in range(i_min + 1, grid_size):
        if h_vals[j] >= 0.0:
            right = thetas[j]
            break
    if right is None:
        if eval_h(c, theta_max) < 0.0:
            theta_hi = float(theta_max)
        else:
            right = theta_max
    if right is not None:
        theta_hi = _bisect_sign_change(
            lambda t: -eval_h(c, t), theta_argmin, float(right)
        )

    interior = np.linspace(theta_lo, theta_hi, 514)[1:-1]
    return ThetaSearchResult(
        status=ThetaStatus.WINDOW,
        window=(float(theta_lo), float(theta_hi)),
        theta_best=best_theta_over(interior),
        h_min=float(h_min),
        theta_argmin=float(theta_argmin),
    )
