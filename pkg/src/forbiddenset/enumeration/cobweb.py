"""Backward orbit of the pole for monotone maps with a pole at 0.

A monotone map with pole is continuous and injective on ``R \\ {0}``, takes
the value 0, and blows up at 0.  Its forbidden set is the backward orbit
``f^{-1}(0), f^{-2}(0), ...``; the classification follows the cobweb picture:
decreasing maps stay in ``[f^{-1}(0), f^{-2}(0)]`` and converge to the fixed
point there or to a 2-cycle; increasing maps converge monotonically to the
nearest fixed point when one lies on the far side of ``f^{-1}(0)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from ..fsdesc import PointSequence

ROOT_TOL = 1e-12
MAX_ITER = 200
_T = np.linspace(-60.0, 60.0, 1201)  # log-scale sample grid on each side

DECREASING = "decreasing"
INCREASING = "increasing"

FIXED_POINT = "converges-to-fixed-point"
TWO_CYCLE = "converges-to-2-cycle"
MONOTONE_UP = "monotone-increasing-to-fixed-point"
MONOTONE_DOWN = "monotone-decreasing-to-fixed-point"
FINITE = "finite"
UNCLASSIFIED = "unclassified"


def is_odd_rational(p) -> bool:
    q = Fraction(p)
    return q.numerator % 2 != 0 and q.denominator % 2 != 0


def odd_power(x, p):
    """``sign(x) |x|^p``, the real branch for an odd rational ``p``."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.abs(x) ** float(p)


def _side_points(side: int) -> np.ndarray:
    return side * np.exp(_T)


@dataclass
class MonotonePoleMap:
    """Scalar map with pole at 0, checked for (A1)-(A4) on log-spaced samples."""

    func: Callable
    name: str = "f"
    checks: dict = field(default_factory=dict)
    direction: str | None = None
    fixed_points: list = field(default_factory=list)

    def __post_init__(self):
        if not self.checks:
            self._verify()

    def __call__(self, x):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            return self.func(x)

    @property
    def verified(self) -> bool:
        return all(self.checks.values())

    def _verify(self):
        vals = {s: np.asarray(self(_side_points(s)), dtype=np.float64) for s in (-1, 1)}
        finite = {s: np.isfinite(v) for s, v in vals.items()}
        a1 = all(f[100:-100].all() for f in finite.values())
        dirs = set()
        for s, v in vals.items():
            v = v[finite[s]]
            d = np.diff(v) * s  # increasing in x means increasing in t for s = +1
            if (d > 0).all():
                dirs.add(INCREASING)
            elif (d < 0).all():
                dirs.add(DECREASING)
            else:
                # ties at saturation are allowed, a sign flip is not
                if (d >= 0).all():
                    dirs.add(INCREASING)
                elif (d <= 0).all():
                    dirs.add(DECREASING)
                else:
                    dirs.add("mixed")
        monotone = len(dirs) == 1 and "mixed" not in dirs
        ranges = {s: (np.nanmin(v[finite[s]]), np.nanmax(v[finite[s]])) for s, v in vals.items()}
        (lo1, hi1), (lo2, hi2) = ranges[-1], ranges[1]
        disjoint = hi1 <= lo2 or hi2 <= lo1
        a3 = any(lo <= 0 <= hi for lo, hi in ranges.values())
        near = self(np.array([-1e-12, 1e-12]))
        a4 = bool(np.all(np.abs(near) > 1e6))
        self.checks = {"A1": bool(a1), "A2": bool(monotone and disjoint), "A3": bool(a3), "A4": a4}
        self.direction = dirs.pop() if monotone else None
        self.fixed_points = self._fixed_points()

    def _fixed_points(self) -> list:
        out = []
        for s in (-1, 1):
            xs = _side_points(s)
            g = np.asarray(self(xs)) - xs
            for i in range(len(xs) - 1):
                a, b = g[i], g[i + 1]
                if not (np.isfinite(a) and np.isfinite(b)):
                    continue
                if a == 0:
                    out.append(float(xs[i]))
                elif a * b < 0:
                    r = brentq(lambda x: float(self(x)) - x, xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15, maxiter=MAX_ITER)
                    out.append(float(r))
        return sorted(out)

    def inverse(self, w: float) -> float | None:
        """The unique ``x != 0`` with ``f(x) = w``, or ``None`` if ``w`` is not attained."""
        for s in (-1, 1):
            xs = _side_points(s)
            g = np.asarray(self(xs), dtype=np.float64) - w
            ok = np.isfinite(g)
            for i in range(len(xs) - 1):
                if not (ok[i] and ok[i + 1]):
                    continue
                if g[i] == 0:
                    return float(xs[i])
                if g[i] * g[i + 1] < 0:
                    a, b = sorted((xs[i], xs[i + 1]))
                    return float(brentq(lambda x: float(self(x)) - w, a, b, xtol=1e-300, rtol=1e-15, maxiter=MAX_ITER))
        return None


def power_pole_map(p, a=-0.5, b=1.0) -> MonotonePoleMap:
    """``f(x) = b + a / x^p`` with ``x^p`` the real branch of an odd rational power."""
    if not is_odd_rational(p):
        raise ValueError(f"{p} is not an odd rational")
    pf = Fraction(p)
    return MonotonePoleMap(lambda x: b + a / odd_power(x, pf), f"{b} + {a}/x^{pf}")


def sinh_pole_map(a=1.0) -> MonotonePoleMap:
    """``f(x) = a / sinh(x) + 1``."""
    return MonotonePoleMap(lambda x: a / np.sinh(x) + 1, f"{a}/sinh(x) + 1")


def bijection_pole_map(a, phi: Callable, name: str = "phi") -> MonotonePoleMap:
    """``f(x) = a / phi(x) + 1`` for a bijection ``phi`` with ``phi(0) = 0``."""
    return MonotonePoleMap(lambda x: a / phi(x) + 1, f"{a}/{name}(x) + 1")


@dataclass
class CobwebResult:
    points: list
    classification: str
    direction: str | None
    limit: object = None
    residual: float | None = None
    interval: tuple | None = None
    diagnostics: dict = field(default_factory=dict)

    def in_interval(self) -> bool:
        if self.interval is None:
            return True
        lo, hi = self.interval
        return all(lo - 1e-12 <= x <= hi + 1e-12 for x in self.points)

    def as_fs(self) -> PointSequence:
        limit = self.limit if isinstance(self.limit, float) else None
        return PointSequence(list(self.points), f"cobweb:{self.classification}", limit, list(range(len(self.points))))


def cobweb_fs(fmap: MonotonePoleMap, N: int, tail: int = 20, conv_tol: float = 1e-8) -> CobwebResult:
    """The first ``N`` backward iterates of the pole and their classification.

    Point ``n`` (starting at ``n = 0`` for ``f^{-1}(0)``) crashes at step ``n+1``.
    """
    if not fmap.verified:
        raise ValueError(f"{fmap.name} fails the monotone-pole checks: {fmap.checks}")
    pts = []
    w = 0.0
    for _ in range(N):
        x = fmap.inverse(w)
        if x is None:
            break
        pts.append(x)
        w = x
    diag = {"fixed_points": fmap.fixed_points, "checks": fmap.checks}
    if len(pts) < N:
        return CobwebResult(pts, FINITE, fmap.direction, diagnostics=diag)
    x1 = pts[0]
    x2 = pts[1] if len(pts) > 1 else None
    interval = None if x2 is None else (min(x1, x2), max(x1, x2))
    P = fmap.fixed_points
    if fmap.direction == DECREASING:
        inside = [x for x in P if min(x1, 0) < x < max(x1, 0)]
        xbar = inside[0] if inside else None
        even, odd = pts[-2::-2][:tail], pts[-1::-2][:tail]
        le, lo = even[0], odd[0]
        if xbar is not None and abs(le - xbar) < conv_tol and abs(lo - xbar) < conv_tol:
            res = max(abs(le - xbar), abs(lo - xbar))
            return CobwebResult(pts, FIXED_POINT, DECREASING, xbar, res, interval, diag)
        spread_e = max(even) - min(even)
        spread_o = max(odd) - min(odd)
        if spread_e < conv_tol and spread_o < conv_tol:
            # the two limits form a 2-cycle of f
            res = max(abs(float(fmap(le)) - lo), abs(float(fmap(lo)) - le))
            return CobwebResult(pts, TWO_CYCLE, DECREASING, (le, lo), res, interval, diag)
        diag["tail_spread"] = (spread_e, spread_o)
        return CobwebResult(pts, UNCLASSIFIED, DECREASING, None, None, interval, diag)
    if fmap.direction == INCREASING and P:
        lo_fp, hi_fp = min(P), max(P)
        if lo_fp > x1:
            res = abs(pts[-1] - lo_fp)
            tag = MONOTONE_UP if res < conv_tol else UNCLASSIFIED
            return CobwebResult(pts, tag, INCREASING, lo_fp, res, (x1, lo_fp), diag)
        if hi_fp < x1:
            res = abs(pts[-1] - hi_fp)
            tag = MONOTONE_DOWN if res < conv_tol else UNCLASSIFIED
            return CobwebResult(pts, tag, INCREASING, hi_fp, res, (hi_fp, x1), diag)
    arr = np.asarray(pts)
    diag.update(
        {
            "min": float(arr.min()),
            "max": float(arr.max()),
            "mean_abs": float(np.mean(np.abs(arr))),
            "sign_changes": int(np.sum(np.diff(np.sign(arr)) != 0)),
        }
    )
    return CobwebResult(pts, UNCLASSIFIED, fmap.direction, None, None, None, diag)


def cobweb_path(fmap: MonotonePoleMap, points) -> list[tuple[float, float]]:
    """Polyline of the cobweb diagram for a backward orbit (for plotting)."""
    path = []
    prev = 0.0
    for x in points:
        path.append((x, prev))
        path.append((x, x))
        prev = x
    return path
