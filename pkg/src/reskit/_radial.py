"""Radial kernel profiles and their 2D radial derivatives.

Profiles are written in the scaled radius ``s = shape * r``.  The 2D Laplacian
of a radial function is ``f'' + f'/s``; gradients are expressed through
``f'(s)/s`` so that they stay finite at the center.  All expressions are
derived once with sympy and cached as numpy callables.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import sympy as sp

_S = sp.Symbol("s", nonnegative=True)

# smoothness = number of continuous derivatives of the radial kernel on R^2
FAMILIES = {
    "matern52": {
        "expr": lambda s: (1 + sp.sqrt(5) * s + sp.Rational(5, 3) * s**2) * sp.exp(-sp.sqrt(5) * s),
        "smoothness": 4,
    },
    "matern72": {
        "expr": lambda s: (
            1 + sp.sqrt(7) * s + sp.Rational(14, 5) * s**2
            + sp.Rational(7, 15) * sp.sqrt(7) * s**3
        ) * sp.exp(-sp.sqrt(7) * s),
        "smoothness": 6,
    },
    "gaussian": {
        "expr": lambda s: sp.exp(-s**2),
        "smoothness": np.inf,
    },
}


def _lap(f):
    return sp.simplify(sp.diff(f, _S, 2) + sp.diff(f, _S) / _S)


@lru_cache(maxsize=None)
def _expressions(family: str) -> dict:
    phi = FAMILIES[family]["expr"](_S)
    lap = _lap(phi)
    return {
        "phi": phi,
        "dphi_s": sp.simplify(sp.diff(phi, _S) / _S),
        "lap": lap,
        "dlap_s": sp.simplify(sp.diff(lap, _S) / _S),
        "lap2": _lap(lap),
    }


@lru_cache(maxsize=None)
def profile(family: str, name: str):
    """Vectorized numpy function of ``s`` for one profile of ``family``."""
    expr = _expressions(family)[name]
    fn = sp.lambdify(_S, expr, "numpy")
    with np.errstate(all="ignore"):
        if not np.isfinite(fn(np.float64(0.0))):
            raise RuntimeError(f"profile {family}/{name} not regular at s=0")

    def f(s):
        s = np.asarray(s, dtype=float)
        return np.broadcast_to(fn(s), s.shape).astype(float)

    return f
