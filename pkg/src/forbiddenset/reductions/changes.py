"""Changes of variables as window maps.

A change carries a source window ``(x_{n-K+1}, ..., x_n)`` to a target window
``(z_{n-r+1}, ..., z_n)``.  Each target coordinate is a rational function of the
source lags, so one class covers quotients, products and pointwise Möbius maps.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..algebra.maps import RationalFunction, lag_names
from ..algebra.mobius import MobiusTransform
from ..algebra.poly import Poly, factor_rational
from ..algebra.scalars import is_exact, is_zero, simplify


def shift_poly(p: Poly, t: int, order: int) -> Poly:
    """Replace every lag ``x{j}`` by ``x{j+t}`` in the ring ``lag_names(order)``."""
    names = lag_names(order)
    p = p.with_variables(names)
    out = {}
    for exp, c in p.terms.items():
        new = [0] * order
        for idx, e in enumerate(exp):
            if e:
                j = order - 1 - idx + t
                if j >= order:
                    raise ValueError(f"shift by {t} leaves a window of length {order}")
                new[order - 1 - j] = e
        out[tuple(new)] = c
    return Poly(names, out)


def shift_rf(rf: RationalFunction, t: int, order: int) -> RationalFunction:
    return RationalFunction(shift_poly(rf.num, t, order), shift_poly(rf.den, t, order), reduce=False)


@dataclass(frozen=True)
class ChangeOfVariables:
    """Window map; ``components`` are newest last, in the ring ``lag_names(source_order)``."""

    kind: str
    arg: tuple
    source_order: int
    target_order: int
    components: tuple

    def __call__(self, window: Sequence, tol: float = 1e-12):
        """Target window for a source window, or ``None`` on the singular locus."""
        if len(window) != self.source_order:
            raise ValueError(f"window has length {len(window)}, change expects {self.source_order}")
        out = []
        for rf in self.components:
            n, d, ns, ds = rf.evaluate(window)
            if (d == 0) if is_exact(d) else is_zero(d, tol, ds):
                return None
            v = n / d
            out.append(simplify(v) if is_exact(v) else v)
        return tuple(out)

    apply = __call__

    def singular_locus(self) -> list[Poly]:
        """Irreducible conditions ``p = 0`` on which some component is undefined."""
        seen = []
        for rf in self.components:
            den = rf.den
            if den.is_constant():
                continue
            facs = [f for f, _ in factor_rational(den)] if den.is_rational() else [den]
            for f in facs:
                if f not in seen:
                    seen.append(f)
        return seen

    def describe(self) -> str:
        comps = ", ".join(str(c) for c in self.components)
        return f"{self.kind}{self.arg}: ({comps})"


def lagged_change(kind: str, arg: tuple, base: RationalFunction, source_order: int, target_order: int) -> ChangeOfVariables:
    """Target window built from ``base`` (the newest target term) and its lagged copies."""
    base = base.with_variables(lag_names(source_order))
    comps = tuple(shift_rf(base, t, source_order) for t in range(target_order - 1, -1, -1))
    return ChangeOfVariables(kind, arg, source_order, target_order, comps)


def _x(j: int, order: int) -> Poly:
    return Poly.var(f"x{j}", lag_names(order))


def quotient_lag(j: int, source_order: int | None = None, target_order: int = 1) -> ChangeOfVariables:
    """``z_n = x_{n-j} / x_n``."""
    src = source_order or j + target_order
    return lagged_change("quotient-lag", (j,), RationalFunction(_x(j, src), _x(0, src), reduce=False), src, target_order)


def quotient(j: int, source_order: int | None = None, target_order: int = 1) -> ChangeOfVariables:
    """``z_n = x_n / x_{n-j}``."""
    src = source_order or j + target_order
    return lagged_change("quotient", (j,), RationalFunction(_x(0, src), _x(j, src), reduce=False), src, target_order)


def product_lags(k: int, source_order: int | None = None, target_order: int = 1) -> ChangeOfVariables:
    """``z_n = x_n * x_{n-1} * ... * x_{n-k}``."""
    src = source_order or k + target_order
    p = Poly.constant(1, lag_names(src))
    for j in range(k + 1):
        p = p * _x(j, src)
    return lagged_change("product-lags", (k,), RationalFunction(p, reduce=False), src, target_order)


def product_pair(j: int, source_order: int | None = None, target_order: int = 1) -> ChangeOfVariables:
    """``z_n = x_n * x_{n-j}``."""
    src = source_order or j + target_order
    return lagged_change("product-pair", (j,), RationalFunction(_x(0, src) * _x(j, src), reduce=False), src, target_order)


def mobius_pointwise(T: MobiusTransform, order: int, kind: str = "mobius") -> ChangeOfVariables:
    """``x_m = T(y_m)`` applied to every entry of a window (source is the y side)."""
    names = lag_names(order)
    y = Poly.var("x0", names)
    base = RationalFunction(y * T.a + T.b, y * T.c + T.d, reduce=False)
    return lagged_change(kind, (T,), base, order, order)


def affine_shift(b, order: int) -> ChangeOfVariables:
    """``x_n = y_n - b``."""
    return mobius_pointwise(MobiusTransform(1, -simplify(b), 0, 1), order, "affine-shift")


def reciprocal_shift(kappa, order: int) -> ChangeOfVariables:
    """``x_n = 1 / (y_n - kappa)``."""
    return mobius_pointwise(MobiusTransform(0, 1, 1, -simplify(kappa)), order, "reciprocal-shift")


def parse_change(text: str, source_order: int, target_order: int) -> ChangeOfVariables:
    """``"quotient-lag 2"``, ``"product-lags 3"``, ``"product-pair 1"`` or ``"quotient 1"``."""
    parts = text.split()
    if len(parts) != 2:
        raise ValueError(f"bad change description {text!r}")
    kind, j = parts[0], int(parts[1])
    makers = {
        "quotient-lag": quotient_lag,
        "quotient": quotient,
        "product-lags": product_lags,
        "product-pair": product_pair,
    }
    if kind not in makers:
        raise ValueError(f"unknown change kind {kind!r}")
    return makers[kind](j, source_order, target_order)
