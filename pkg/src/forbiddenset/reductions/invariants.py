"""Algebraic invariants and the order reduction they give.

Two shapes are supported:

* ``mobius-product``: ``T1(x_n) * T2(x_{n-k}) = C``, whose equation is
  ``x_{n+1} = T1^{-1}(T1(x_n) T2(x_{n-k}) / T2(x_{n-k+1}))`` and whose reduced
  form is ``x_{n+1} = T1^{-1}(C / T2(x_{n-k+1}))``;
* ``difference-ratio``: ``(x_{n+1} - x_{n-k}) / (x_{n+1} - x_{n-l}) = C``, whose
  reduced form is the linear ``x_{n+1} = (C x_{n-l} - x_{n-k}) / (C - 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..algebra.maps import RationalFunction, RationalMap, lag_names
from ..algebra.mobius import MobiusTransform
from ..algebra.poly import Poly
from ..algebra.scalars import is_exact, is_zero, simplify
from ..fsdesc import HypersurfaceFamily


@dataclass(frozen=True)
class SingularInit:
    """The invariant is undefined at the given initial window."""

    reason: str = "denominator vanishes"


def _mobius_rf(T: MobiusTransform, var: str, names) -> RationalFunction:
    x = Poly.var(var, names)
    return RationalFunction(x * T.a + T.b, x * T.c + T.d, reduce=False)


def _apply_mobius_rf(T: MobiusTransform, w: RationalFunction) -> RationalFunction:
    return RationalFunction(w.num * T.a + w.den * T.b, w.num * T.c + w.den * T.d)


@dataclass(frozen=True)
class InvariantForm:
    kind: str
    k: int
    l: int = 0
    T1: MobiusTransform | None = None
    T2: MobiusTransform | None = None

    def __post_init__(self):
        if self.kind == "mobius-product":
            if self.T1 is None or self.T2 is None or self.k < 1:
                raise ValueError("mobius-product needs T1, T2 and k >= 1")
        elif self.kind == "difference-ratio":
            if self.k == self.l or min(self.k, self.l) < 0:
                raise ValueError("difference-ratio needs distinct k, l >= 0")
        else:
            raise ValueError(f"unknown invariant kind {self.kind!r}")

    @classmethod
    def mobius_product(cls, T1: MobiusTransform, T2: MobiusTransform, k: int = 1) -> "InvariantForm":
        return cls("mobius-product", k, 0, T1, T2)

    @classmethod
    def difference_ratio(cls, k: int, l: int) -> "InvariantForm":
        return cls("difference-ratio", k, l)

    @property
    def source_order(self) -> int:
        if self.kind == "mobius-product":
            return self.k + 1
        return max(self.k, self.l) + 2

    @property
    def reduced_order(self) -> int:
        return self.source_order - 1

    def expression(self) -> RationalFunction:
        """The invariant as a function of the window ``(x_{n-K+1}, ..., x_n)``."""
        names = lag_names(self.source_order)
        if self.kind == "mobius-product":
            return _mobius_rf(self.T1, "x0", names) * _mobius_rf(self.T2, f"x{self.k}", names)
        x0 = Poly.var("x0", names)
        return RationalFunction(
            x0 - Poly.var(f"x{self.k + 1}", names), x0 - Poly.var(f"x{self.l + 1}", names)
        )

    def equation(self) -> RationalMap:
        """The difference equation along whose orbits the form is constant."""
        names = lag_names(self.source_order)
        if self.kind == "mobius-product":
            w = (
                _mobius_rf(self.T1, "x0", names)
                * _mobius_rf(self.T2, f"x{self.k}", names)
                / _mobius_rf(self.T2, f"x{self.k - 1}", names)
            )
            rf = _apply_mobius_rf(self.T1.inverse(), w)
            return RationalMap(rf.num, rf.den, self.source_order)
        # C_n x_{n-l} - x_{n-k} over C_n - 1, with C_n the form at time n
        C = self.expression()
        xl = RationalFunction(Poly.var(f"x{self.l}", names), reduce=False)
        xk = RationalFunction(Poly.var(f"x{self.k}", names), reduce=False)
        rf = (C * xl - xk) / (C - 1)
        return RationalMap(rf.num, rf.den, self.source_order)

    def singular_constants(self) -> list:
        return [Fraction(0)] if self.kind == "mobius-product" else [Fraction(1)]


def invariant_constant(form: InvariantForm, init: Sequence, tol: float = 1e-12):
    """Value of the invariant at an initial window, or :class:`SingularInit`."""
    if len(init) != form.source_order:
        raise ValueError(f"window has length {len(init)}, invariant needs {form.source_order}")
    n, d, ns, ds = form.expression().evaluate([simplify(x) for x in init])
    if (d == 0) if is_exact(d) else is_zero(d, tol, ds):
        return SingularInit()
    v = n / d
    return simplify(v) if is_exact(v) else v


def invariant_reduce(form: InvariantForm, C) -> RationalMap:
    """The ``C``-dependent reduced equation (order one less than the original)."""
    C = simplify(C)
    if any(C == s for s in form.singular_constants()):
        locus = "T1 or T2 hits zero" if form.kind == "mobius-product" else "x_n = x_{n-l-1}"
        raise ValueError(f"C = {C} is singular for this invariant ({locus})")
    r = form.reduced_order
    names = lag_names(r)
    if form.kind == "mobius-product":
        t2 = _mobius_rf(form.T2, f"x{form.k - 1}", names)
        w = RationalFunction(Poly.constant(C, names), reduce=False) / t2
        rf = _apply_mobius_rf(form.T1.inverse(), w)
        return RationalMap(rf.num, rf.den, r)
    xl = Poly.var(f"x{form.l}", names)
    xk = Poly.var(f"x{form.k}", names)
    return RationalMap(xl * C - xk, Poly.constant(C - 1, names), r)


def parse_invariant(text: str) -> InvariantForm:
    """``"mobius-product k; a, b, c, d; a, b, c, d"`` or ``"difference-ratio k l"``.

    Möbius coefficients may name scalars already substituted by the caller.
    """
    head, *rest = [p.strip() for p in text.split(";")]
    parts = head.split()
    if parts[0] == "difference-ratio":
        return InvariantForm.difference_ratio(int(parts[1]), int(parts[2]))
    if parts[0] == "mobius-product":
        from ..algebra.scalars import parse_scalar

        Ts = [MobiusTransform(*[parse_scalar(c) for c in r.split(",")]) for r in rest]
        return InvariantForm.mobius_product(Ts[0], Ts[1], int(parts[1]))
    raise ValueError(f"unknown invariant {text!r}")


def palladino_form(B) -> InvariantForm:
    """``(1/x_n + B)(1 + B x_{n-1}) = C``."""
    B = simplify(B)
    return InvariantForm.mobius_product(MobiusTransform(B, 1, 1, 0), MobiusTransform(B, 1, 0, 1), 1)


def aghajani_form() -> InvariantForm:
    """``(x_n - x_{n-2}) / (x_n - x_{n-1}) = C``."""
    return InvariantForm.difference_ratio(1, 0)


def aghajani_fs() -> HypersurfaceFamily:
    """The two planes ``x = y`` (crash at step 0) and ``y = z`` (step 1).

    The state is ``(x, y, z) = (x_{-2}, x_{-1}, x_0)``.  Off these planes
    ``C != 1`` and consecutive differences scale by ``1/(C-1)``, so no later
    denominator vanishes.
    """
    names = lag_names(3)
    x, y, z = (Poly.var(v, names) for v in names)
    return HypersurfaceFamily(names, [(0, x - y), (1, y - z)], "aghajani-invariant", [0, 1], complete=True)
