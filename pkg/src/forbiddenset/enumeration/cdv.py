"""Explicit forbidden curves of ``x_{n+1} = p + x_{n-1}/x_n`` for ``p <= -1``.

The curves ``y = g_n^{-1}(x)`` are the images ``G^n(A^+)`` of the half line
``A^+ = {(s, 0): s >= 0}`` under the inverse unfolding ``G(x, y) = (x (y - p), x)``.
That parametrization gives ``g_n`` and ``g_n^{-1}`` with one root-find each
instead of nesting the recursive operator ``h_g(x) = x (-p + g^{-1}(x))``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..algebra.maps import RationalMap, lag_names
from ..algebra.poly import Poly
from ..algebra.scalars import simplify

ROOT_TOL = 1e-12
MAX_ITER = 200


def cdv_equation(p) -> RationalMap:
    """``x_{n+1} = (p x_n + x_{n-1}) / x_n``."""
    names = lag_names(2)
    x, y = Poly.var("x1", names), Poly.var("x0", names)
    return RationalMap(y * simplify(p) + x, y, 2)


def _g_orbit(p: float, s, n: int):
    """``G^n(s, 0)`` componentwise (vectorized over ``s``)."""
    x, y = np.asarray(s, dtype=np.float64), np.zeros_like(np.asarray(s, dtype=np.float64))
    for _ in range(n):
        x, y = x * (y - p), x
    return x, y


def _invert_increasing(fn, target: float, hi: float = 1.0) -> float:
    """``s >= 0`` with ``fn(s) = target`` for increasing ``fn`` with ``fn(0) = 0``."""
    if target < 0:
        raise ValueError("curves live on x >= 0")
    if target == 0:
        return 0.0
    while fn(hi) < target:
        hi *= 2.0
        if hi > 1e300:
            raise ValueError("bracket failure")
    return brentq(lambda s: fn(s) - target, 0.0, hi, xtol=ROOT_TOL * max(1.0, hi), rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER)


@dataclass(frozen=True)
class CdvCurveFamily:
    """Curves ``g_1 .. g_N`` for parameter ``p <= -1``."""

    p: float
    N: int
    tol: float = ROOT_TOL

    def point(self, n: int, s):
        """``G^n(s, 0)``: a point ``(x, g_n^{-1}(x))`` of curve ``n``."""
        self._check(n)
        return _g_orbit(self.p, s, n)

    def g(self, n: int, t: float) -> float:
        """``g_n(t)`` for ``t >= 0``."""
        self._check(n)
        s = _invert_increasing(lambda s: float(_g_orbit(self.p, s, n)[1]), t)
        return float(_g_orbit(self.p, s, n)[0])

    def g_inv(self, n: int, x: float) -> float:
        """``g_n^{-1}(x)`` for ``x >= 0``."""
        self._check(n)
        s = _invert_increasing(lambda s: float(_g_orbit(self.p, s, n)[0]), x)
        return float(_g_orbit(self.p, s, n)[1])

    def h(self, g_inv_prev, x: float) -> float:
        """The recursive operator ``h_g(x) = x (-p + g^{-1}(x))``."""
        return x * (-self.p + g_inv_prev(x))

    def sample(self, n: int, xs) -> np.ndarray:
        """Curve ``n`` as ``y = g_n^{-1}(x)`` at the given ``x >= 0``."""
        return np.array([self.g_inv(n, float(x)) for x in xs])

    def _check(self, n: int):
        if not 1 <= n <= self.N:
            raise ValueError(f"curve index must lie in 1..{self.N}")


def cdv_curves(p, N: int, tol: float = ROOT_TOL) -> CdvCurveFamily:
    p = float(p)
    if p > -1:
        raise ValueError("the explicit curves need p <= -1")
    if N < 1:
        raise ValueError("N must be >= 1")
    return CdvCurveFamily(p, N, tol)
