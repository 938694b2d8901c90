"""Built-in scalar reaction terms f(p, q), g(p, q) and their constant data.

Each builtin is written with numpy ufuncs so the same callable evaluates
single values, coordinate vectors and stacked grids.  The declared constants
(Lipschitz or growth, with offsets) drive the contraction certificates; they
are valid bounds, not necessarily sharp ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence

import numpy as np

from .errors import SchemaError
from .solvers import LipschitzData, NonlinearPair

__all__ = [
    "ScalarNonlinearity",
    "make_nonlinearity",
    "pointwise_pair",
    "scalar_lipschitz_data",
    "check_declared_constants",
    "BUILTIN_NAMES",
]


@dataclass(frozen=True)
class ScalarNonlinearity:
    """A pair of scalar reaction terms with declared condition-class data.

    condition is one of "c1" (both Lipschitz), "c2" (both linear growth) or
    "c3" (f growth, g Lipschitz).  a11/a12 bound f in (p, q), a21/a22 bound
    g, and c_f/c_g are the growth offsets where applicable.  bounded declares
    that both f and g are bounded functions.
    """

    name: str
    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    g: Callable[[np.ndarray, np.ndarray], np.ndarray]
    condition: str
    a11: float = 0.0
    a12: float = 0.0
    a21: float = 0.0
    a22: float = 0.0
    c_f: float = 0.0
    c_g: float = 0.0
    bounded: bool = False

    def __post_init__(self):
        if self.condition not in ("c1", "c2", "c3"):
            raise ValueError(f"unknown condition class {self.condition!r}")


def _zero(params: Sequence[float]) -> ScalarNonlinearity:
    return ScalarNonlinearity(
        name="zero",
        f=lambda p, q: np.zeros_like(np.asarray(p, dtype=float)),
        g=lambda p, q: np.zeros_like(np.asarray(p, dtype=float)),
        condition="c1",
        bounded=True,
    )


def _sin_cos(params: Sequence[float]) -> ScalarNonlinearity:
    """f = cf sin(q), g = cg cos(p): bounded, Lipschitz cf resp. cg."""
    cf, cg = params
    return ScalarNonlinearity(
        name="sin-cos",
        f=lambda p, q: cf * np.sin(q),
        g=lambda p, q: cg * np.cos(p),
        condition="c1",
        a12=abs(cf),
        a21=abs(cg),
        c_f=abs(cf),
        c_g=abs(cg),
        bounded=True,
    )


def _logistic(params: Sequence[float]) -> ScalarNonlinearity:
    """Centered sigmoids f = cf (s(q) - 1/2), g = cg (s(p) - 1/2), |f| <= cf/2."""
    cf, cg = params

    def sigma(z):
        return 1.0 / (1.0 + np.exp(-np.asarray(z, dtype=float)))

    return ScalarNonlinearity(
        name="logistic",
        f=lambda p, q: cf * (sigma(q) - 0.5),
        g=lambda p, q: cg * (sigma(p) - 0.5),
        condition="c2",
        c_f=abs(cf) / 2.0,
        c_g=abs(cg) / 2.0,
        bounded=True,
    )


def _sqrt_bounded(params: Sequence[float]) -> ScalarNonlinearity:
    """f = c0 sqrt(|p|) + c1 (growth, not Lipschitz), g = cg cos(p) (Lipschitz).

    sqrt(|p|) <= (1 + |p|)/2 yields the growth data a11 = c0/2 with offset
    c0/2 + c1; for g the offset is |g(0, 0)| = cg.
    """
    c0, c1, cg = params
    return ScalarNonlinearity(
        name="sqrt-bounded",
        f=lambda p, q: c0 * np.sqrt(np.abs(p)) + c1,
        g=lambda p, q: cg * np.cos(p),
        condition="c3",
        a11=abs(c0) / 2.0,
        a21=abs(cg),
        c_f=abs(c0) / 2.0 + abs(c1),
        c_g=abs(cg),
        bounded=False,
    )


_BUILTINS: Dict[str, Dict] = {
    "zero": {"build": _zero, "n_params": 0},
    "sin-cos": {"build": _sin_cos, "n_params": 2},
    "logistic": {"build": _logistic, "n_params": 2},
    "sqrt-bounded": {"build": _sqrt_bounded, "n_params": 3},
}

BUILTIN_NAMES = tuple(sorted(_BUILTINS))


def make_nonlinearity(name: str, params: Sequence[float]) -> ScalarNonlinearity:
    """Resolve a builtin by name; unknown names or arity mismatches are errors."""
    entry = _BUILTINS.get(name)
    if entry is None:
        raise SchemaError(f"unknown nonlinearity {name!r}; known: {', '.join(BUILTIN_NAMES)}")
    if len(params) != entry["n_params"]:
        raise SchemaError(
            f"nonlinearity {name!r} takes {entry['n_params']} parameters, got {len(params)}"
        )
    return entry["build"](list(params))


def pointwise_pair(nl: ScalarNonlinearity) -> NonlinearPair:
    """Lift scalar terms to coordinatewise maps on X = R^d.

    Appropriate for scalar and diagonal-matrix state spaces where each
    coordinate reacts independently; Heat1D problems use the superposition
    lift from the diffusion module instead.
    """

    def F(x, y):
        return np.asarray(nl.f(np.asarray(x, dtype=float), np.asarray(y, dtype=float)), dtype=float)

    def G(x, y):
        return np.asarray(nl.g(np.asarray(x, dtype=float), np.asarray(y, dtype=float)), dtype=float)

    return NonlinearPair(F=F, G=G, F_rows=F, G_rows=G, h_bounded=nl.bounded)


def scalar_lipschitz_data(nl: ScalarNonlinearity) -> LipschitzData:
    """Constant data for the coordinatewise lift (offsets carry over as-is)."""
    mode = {"c1": "lipschitz", "c2": "growth", "c3": "mixed"}[nl.condition]
    return LipschitzData(
        a11=nl.a11,
        a12=nl.a12,
        a21=nl.a21,
        a22=nl.a22,
        g13=nl.c_f,
        g23=nl.c_g,
        mode=mode,
    )


def check_declared_constants(
    nl: ScalarNonlinearity,
    box: float = 2.0,
    samples: int = 400,
    seed: int = 0,
    slack: float = 1e-9,
) -> bool:
    """Spot-check the declared constants on random points of [-box, box]^2.

    Lipschitz declarations are checked on point pairs, growth declarations
    pointwise.  A sampled check, not a proof.
    """
    rng = np.random.default_rng(seed)
    P = rng.uniform(-box, box, size=(samples, 4))
    p, q, p2, q2 = P.T
    ok = True
    if nl.condition in ("c1",):
        df = np.abs(nl.f(p, q) - nl.f(p2, q2))
        ok &= bool(np.all(df <= nl.a11 * np.abs(p - p2) + nl.a12 * np.abs(q - q2) + slack))
    else:
        fv = np.abs(nl.f(p, q))
        ok &= bool(np.all(fv <= nl.a11 * np.abs(p) + nl.a12 * np.abs(q) + nl.c_f + slack))
    if nl.condition in ("c1", "c3"):
        dg = np.abs(nl.g(p, q) - nl.g(p2, q2))
        ok &= bool(np.all(dg <= nl.a21 * np.abs(p - p2) + nl.a22 * np.abs(q - q2) + slack))
    else:
        gv = np.abs(nl.g(p, q))
        ok &= bool(np.all(gv <= nl.a21 * np.abs(p) + nl.a22 * np.abs(q) + nl.c_g + slack))
    return ok
