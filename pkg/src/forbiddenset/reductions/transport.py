"""Möbius changes of variables ``x_n = T(y_n)`` and equations built from them."""
from __future__ import annotations

from ..algebra.maps import DifferenceEquation, RationalFunction, RationalMap, as_equation, compose, lag_names
from ..algebra.mobius import MobiusTransform
from ..algebra.poly import Poly
from ..algebra.scalars import COMPLEX, REAL, is_real_scalar, simplify
from ..fsdesc import FinitePointSet, HypersurfaceFamily, PointSequence
from ..riccati import RiccatiParams1
from .changes import mobius_pointwise, reciprocal_shift
from .core import ReductionResult
from .families import window_tail
from .invariants import InvariantForm


def _mobius_of(T: MobiusTransform, rf: RationalFunction) -> RationalFunction:
    return RationalFunction(rf.num * T.a + rf.den * T.b, rf.num * T.c + rf.den * T.d)


def _field_for(T: MobiusTransform, base: str) -> str:
    if base == COMPLEX or not all(is_real_scalar(x) for x in (T.a, T.b, T.c, T.d)):
        return COMPLEX
    return REAL


def mobius_transport(de, T: MobiusTransform) -> DifferenceEquation:
    """Equation for ``y_n`` when ``x_n = T(y_n)`` solves ``de``.

    ``y_{n+1} = T^{-1}(f(T(y_{n-k+1}), ..., T(y_n)))``, reduced.
    """
    de = as_equation(de)
    m = de.map
    names = lag_names(m.order)
    subs = {}
    for v in names:
        y = Poly.var(v, names)
        subs[v] = RationalFunction(y * T.a + T.b, y * T.c + T.d, reduce=False)
    f = compose(m.numerator, m.denominator, subs, names)
    g = _mobius_of(T.inverse(), f)
    return DifferenceEquation(RationalMap(g.num, g.den, m.order), _field_for(T, de.field), de.domain)


def transport_form(form: Poly, T: MobiusTransform) -> Poly:
    """Numerator of ``form(T(y))`` with the ``T`` denominators cleared."""
    names = form.variables
    subs = {}
    for v in names:
        y = Poly.var(v, names)
        subs[v] = RationalFunction(y * T.a + T.b, y * T.c + T.d, reduce=False)
    return compose(form, form.one(), subs, names).num


def transport_fs(desc, T: MobiusTransform, order: int):
    """Forbidden set of the transported equation from that of the original.

    ``T^{-1}`` of the old set, plus the places where the change itself breaks:
    an entry at the pole of ``T``, or an entry reaching ``T(oo) = a/c`` (then
    ``y_{n+1} = T^{-1}(x_{n+1})`` is undefined).  The second kind is not
    enumerated here; it is the backward orbit of ``a/c`` under the original map.
    """
    Tinv = T.inverse()
    names = lag_names(order)
    if isinstance(desc, (FinitePointSet, PointSequence)) and order == 1:
        pts = [Tinv(p) for p in desc.points]
        pts = [p for p in pts if not (p is None or str(p) == "oo")]
        if T.c != 0:
            pts = [T.pole] + [p for p in pts if p != T.pole]
        return FinitePointSet(pts, f"transport:{desc.generator}", None)
    if isinstance(desc, HypersurfaceFamily):
        layers = [(d, transport_form(p.with_variables(names), T)) for d, p in desc.layers]
        if T.c != 0:
            layers = [(0, Poly.var(v, names) * T.c + T.d) for v in names] + layers
        return HypersurfaceFamily(names, layers, f"transport:{desc.generator}", None, False)
    raise TypeError(f"cannot transport a {type(desc).__name__}")


# ---------------------------------------------------------------------------
# equations built by transport


def _transported(base: RationalMap, T: MobiusTransform, family: str, params: dict, change=None) -> ReductionResult:
    de = mobius_transport(DifferenceEquation(base, COMPLEX), T)
    return ReductionResult(
        family=family,
        params=params,
        source=de.map,
        change=change or mobius_pointwise(T, base.order),
        reduced=base,
    )


MULTIPLICATIVE_EXPONENTS = ((1, -1), (-1, -1), (0, 1), (1, 1), (-1, 1), (0, -1), (-1, 0))


def rhouma_multiplicative(a, p: int, q: int, T: MobiusTransform) -> ReductionResult:
    """``x_{n+1} = a x_n^p x_{n-1}^q`` carried to ``y`` by ``x_n = T(y_n)``."""
    if (p, q) not in MULTIPLICATIVE_EXPONENTS:
        raise ValueError(f"exponents {(p, q)} not supported; pick one of {MULTIPLICATIVE_EXPONENTS}")
    names = lag_names(2)
    x0, x1 = Poly.var("x0", names), Poly.var("x1", names)
    num, den = Poly.constant(simplify(a), names), Poly.constant(1, names)
    for var, e in ((x0, p), (x1, q)):
        if e > 0:
            num = num * var ** e
        elif e < 0:
            den = den * var ** (-e)
    base = RationalMap(num, den, 2)
    return _transported(base, T, "rhouma-multiplicative", {"a": simplify(a), "p": p, "q": q, "T": T})


def rhouma_linear(a, b, c, kappa) -> ReductionResult:
    """``x_{n+1} = a x_n + b x_{n-1} + c`` carried by ``x_n = 1/(y_n - kappa)``."""
    names = lag_names(2)
    base = RationalMap(
        Poly.var("x0", names) * simplify(a) + Poly.var("x1", names) * simplify(b) + simplify(c),
        Poly.constant(1, names),
        2,
    )
    T = MobiusTransform(0, 1, 1, -simplify(kappa))
    vals = {"a": simplify(a), "b": simplify(b), "c": simplify(c), "kappa": simplify(kappa)}
    return _transported(base, T, "rhouma-linear", vals, reciprocal_shift(kappa, 2))


def rhouma_riccati(alpha, beta, gamma, lam, mu, G: MobiusTransform) -> ReductionResult:
    """Second-order equation whose quantity ``H(y_n, y_{n-1})`` follows ``w' = G(w)``.

    ``H(u, v) = (u + alpha v + beta) / (gamma u + lam v + mu)`` and
    ``y_{n+1} = ((lam g - alpha) y_n + (mu g - beta)) / (1 - gamma g)`` with
    ``g = G(H(y_n, y_{n-1}))``.
    """
    alpha, beta, gamma, lam, mu = (simplify(x) for x in (alpha, beta, gamma, lam, mu))
    names = lag_names(2)
    u, v = Poly.var("x0", names), Poly.var("x1", names)
    H = RationalFunction(u + v * alpha + beta, u * gamma + v * lam + mu)
    if H.den.is_constant() and H.num.degree() == 0:
        raise ValueError("H is constant")
    g = _mobius_of(G, H)
    U = RationalFunction(u, reduce=False)
    y_next = (U * (g * lam - alpha) + (g * mu - beta)) / (1 - g * gamma)
    source = RationalMap(y_next.num, y_next.den, 2)
    from .changes import ChangeOfVariables

    change = ChangeOfVariables("riccati-quotient", (alpha, beta, gamma, lam, mu), 2, 1, (H,))
    # G(w) = (A w + B)/(C w + D) is the Riccati map (B + A w)/(D + C w)
    red = RiccatiParams1(G.b, G.a, G.d, G.c).equation().map
    vals = {"alpha": alpha, "beta": beta, "gamma": gamma, "lambda": lam, "mu": mu, "G": G}
    return ReductionResult("rhouma-riccati", vals, source, change, red)


def mobius_product_family(T1: MobiusTransform, T2: MobiusTransform, k: int = 1) -> ReductionResult:
    """Equation of order ``k+1`` preserving ``T1(x_n) T2(x_{n-k}) = C``."""
    form = InvariantForm.mobius_product(T1, T2, k)
    m = form.equation()
    return ReductionResult(
        family="mobius-product",
        params={"T1": T1, "T2": T2, "k": k},
        source=m,
        change=window_tail(form.source_order, form.reduced_order),
        reduced=None,
        invariant=form,
    )
