"""Riccati difference equations of order 1, 2 and k.

Order 1 is ``x_{n+1} = (a + b*x_n) / (c + d*x_n)``.  When none of the degenerate
cases applies, an affine change of variables gives the normal form
``y_{n+1} = 1 - R/y_n`` and ``y_n = z_n/z_{n-1}`` linearizes it to
``z_{n+1} = z_n - R*z_{n-1}``.  Order k is
``x_{n+1} = a_0 + a_1/x_n + ... + a_k/(x_n ... x_{n-k+1})``, linearized by
``x_n = y_n/y_{n-1}`` into ``y_{n+1} = a_0*y_n + ... + a_k*y_{n-k}``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra.maps import DEFAULT_TOL, DifferenceEquation, RationalMap, iterate, lag_names
from .algebra.mobius import MobiusTransform
from .algebra.poly import Poly
from .algebra.scalars import (
    COMPLEX,
    REAL,
    Scalar,
    exact_sqrt,
    is_exact,
    is_real_scalar,
    is_zero,
    magnitude,
    simplify,
    to_complex,
)
from .fsdesc import FinitePointSet, HypersurfaceFamily, PointSequence

DEFAULT_ROOT_BOUND = 120


class RiccatiClass(enum.Enum):
    LINEAR = "linear"
    CONSTANT = "constant"
    PERIOD2 = "period-2"
    PROPER = "proper"


@dataclass(frozen=True)
class RiccatiParams1:
    """Coefficients of ``x_{n+1} = (a + b*x_n) / (c + d*x_n)``."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, simplify(getattr(self, name)))
        if self.c == 0 and self.d == 0:
            raise ValueError("c and d cannot both vanish")

    @property
    def field(self) -> str:
        return REAL if all(is_real_scalar(x) for x in (self.a, self.b, self.c, self.d)) else COMPLEX

    def mobius(self) -> MobiusTransform:
        """The map as ``T(x) = (b*x + a) / (d*x + c)`` (needs ``ad - bc != 0``)."""
        return MobiusTransform(self.b, self.a, self.d, self.c)

    def equation(self) -> DifferenceEquation:
        v = lag_names(1)
        x = Poly.var("x0", v)
        m = RationalMap(x * self.b + self.a, x * self.d + self.c, 1)
        return DifferenceEquation(m, self.field)


def classify_riccati1(p: RiccatiParams1) -> RiccatiClass:
    """Exact degenerate-case test, checked in the order linear, constant, period 2."""
    if p.d == 0:
        return RiccatiClass.LINEAR
    if p.a * p.d - p.c * p.b == 0:
        return RiccatiClass.CONSTANT
    if p.b + p.c == 0:
        return RiccatiClass.PERIOD2
    return RiccatiClass.PROPER


def riccati_number(p: RiccatiParams1) -> Scalar:
    if p.b + p.c == 0:
        raise ValueError("the Riccati number needs b + c != 0")
    return simplify((p.b * p.c - p.a * p.d) / (p.b + p.c) ** 2)


def normal_form_params(R) -> RiccatiParams1:
    """``y_{n+1} = 1 - R/y_n`` written as ``(-R + y)/(0 + y)``."""
    return RiccatiParams1(-R, 1, 0, 1)


@dataclass(frozen=True)
class NormalForm:
    """``R`` plus the affine change ``x = phi(y)`` and its inverse ``y = psi(x)``."""

    R: Scalar
    phi: MobiusTransform
    psi: MobiusTransform

    def params(self) -> RiccatiParams1:
        return normal_form_params(self.R)


def riccati_normal_form(p: RiccatiParams1) -> NormalForm:
    tag = classify_riccati1(p)
    if tag is not RiccatiClass.PROPER:
        raise ValueError(f"normal form needs a proper Riccati equation, got {tag.value}")
    R = riccati_number(p)
    # x = ((b + c)/d) y - c/d
    phi = MobiusTransform((p.b + p.c) / p.d, -p.c / p.d, 0, 1)
    return NormalForm(R, phi, phi.inverse())


# ---------------------------------------------------------------------------
# forbidden set of order 1


def _preimage(p: RiccatiParams1, w, tol):
    """``T^{-1}(w) = (a - c*w) / (d*w - b)``; ``None`` where it is undefined."""
    den = p.d * w - p.b
    if is_exact(den):
        if den == 0:
            return None
    elif is_zero(den, tol, magnitude(p.d * w) + magnitude(p.b)):
        return None
    v = (p.a - p.c * w) / den
    return simplify(v) if is_exact(v) else v


def mobius_backward_orbit(p: RiccatiParams1, start, N: int, tol: float = DEFAULT_TOL) -> tuple[list, bool]:
    """``start, T^{-1}(start), ...`` up to ``N`` points; ``finite`` when the orbit stops.

    The orbit stops where ``T^{-1}`` is undefined or a point repeats.
    """
    if N <= 0:
        return [], False
    points = [simplify(start) if is_exact(start) else start]
    while len(points) < N:
        w = _preimage(p, points[-1], tol)
        if w is None or w in points:
            return points, True
        points.append(w)
    return points, _preimage(p, points[-1], tol) is None


def riccati_fs_order1(p: RiccatiParams1, N: int, *, verify: bool = True, tol: float = DEFAULT_TOL):
    """First ``N`` forbidden points: the backward orbit of the pole ``-c/d``.

    Point ``i`` crashes at step ``i`` (its ``x_{i+1}`` is undefined).  A finite
    forbidden set comes back as :class:`FinitePointSet`, a truncated infinite one as
    :class:`PointSequence` with its limit when the topology is known.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    tag = classify_riccati1(p)
    if tag is RiccatiClass.LINEAR:
        # affine map: no pole, so nothing is forbidden unless c = 0 as well (excluded)
        return FinitePointSet([], "riccati1-linear", [])
    pole = simplify(-p.c / p.d)
    if tag is RiccatiClass.CONSTANT:
        if p.b + p.c == 0:
            raise ValueError("constant map onto its own pole: every initial value is forbidden")
        pts = [pole][:N]
        return FinitePointSet(pts, "riccati1-constant", [0] * len(pts))
    points, finite = mobius_backward_orbit(p, pole, N, tol)
    steps = None
    if verify:
        de = p.equation()
        steps = []
        for i, x in enumerate(points):
            out = iterate(de, [x], i + 1, tol=tol, detect_period=False)
            steps.append(out.step if out.crashed else None)
    if finite:
        return FinitePointSet(points, "riccati1-inverse-orbit", steps)
    limit = None
    if tag is RiccatiClass.PROPER:
        R = riccati_number(p)
        topo = riccati_fs_topology(R)
        if topo.tag == FsTopology.CONVERGENT:
            limit = riccati_normal_form(p).phi(topo.limit)
    return PointSequence(points, "riccati1-inverse-orbit", limit, steps)


def riccati_fs_zero_set(R, N: int) -> list:
    """Forbidden points of the normal form read off the linear equation.

    ``z_n = U_{n+1} y_0 - R U_n`` vanishes at ``y_0 = R U_n / U_{n+1}``, where
    ``U`` solves ``U_{n+1} = U_n - R U_{n-1}`` with ``U_0 = 0, U_1 = 1``.
    Stops when ``U_{n+1} = 0`` (the finite, globally periodic case).
    """
    R = simplify(R)
    out = []
    u_prev, u = Fraction(0), Fraction(1)
    for _ in range(N):
        if u == 0:
            break
        v = R * u_prev / u
        out.append(simplify(v) if is_exact(v) else v)
        u_prev, u = u, u - R * u_prev
    return out


# ---------------------------------------------------------------------------
# closed form of the normal form


@dataclass(frozen=True)
class Crash:
    """Forward iteration breaks: ``x_{step+1}`` is undefined."""

    step: int


def _lucas_roots(R):
    """``(lam_plus, lam_minus, s)`` with ``s = sqrt(1 - 4R)``; ``s == 0`` for a double root."""
    if isinstance(R, Fraction):
        s = exact_sqrt(1 - 4 * R)
    else:
        import cmath

        s = cmath.sqrt(1 - 4 * to_complex(R))
    lp = (1 + s) / 2
    lm = (1 - s) / 2
    return simplify(lp), simplify(lm), simplify(s)


def riccati_closed_form(R, y0, n: int, tol: float = DEFAULT_TOL):
    """``y_n`` of ``y_{n+1} = 1 - R/y_n`` from the closed-form solution of the linear equation.

    ``z_m = U_{m+1} y_0 - R U_m`` with ``U_m = (lam_+^m - lam_-^m)/(lam_+ - lam_-)``
    (``m * 2^{1-m}`` for the double root).  Returns :class:`Crash` at the first
    ``m < n`` with ``z_m = 0``.
    """
    R = simplify(R)
    y0 = simplify(y0)
    if R == 0:
        raise ValueError("R = 0 is not a proper normal form")
    if n < 0:
        raise ValueError("n must be >= 0")
    exact = is_exact(R) and is_exact(y0)
    if exact and not isinstance(R, Fraction):
        # no closed-form roots available in a single quadratic field
        return _normal_form_by_recurrence(R, y0, n)
    lp, lm, s = _lucas_roots(R)
    try:
        z_prev = None
        z = None
        pp, pm = Fraction(1), Fraction(1)  # lam^m for m = 0
        u_m = Fraction(0)
        for m in range(0, n + 1):
            pp1, pm1 = pp * lp, pm * lm
            if s == 0:
                u_next = Fraction(m + 1) / Fraction(2) ** m if exact else (m + 1) * 0.5 ** m
            else:
                u_next = (pp1 - pm1) / s
            u_next = simplify(u_next) if is_exact(u_next) else u_next
            z_prev, z = z, simplify(u_next * y0 - R * u_m) if exact else u_next * y0 - R * u_m
            if exact:
                zero = z == 0
            else:
                zero = is_zero(z, tol, magnitude(u_next * y0) + magnitude(R * u_m))
            if zero and m < n:
                return Crash(m)
            pp, pm, u_m = pp1, pm1, u_next
    except ValueError:
        # y0 lives in a different quadratic field than the roots
        return _normal_form_by_recurrence(R, y0, n)
    if n == 0:
        return y0
    v = z / z_prev
    if exact:
        return simplify(v)
    if isinstance(v, complex) and abs(v.imag) <= tol * max(1.0, abs(v)) and is_real_scalar(R) and is_real_scalar(y0):
        return v.real
    return v


def _normal_form_by_recurrence(R, y0, n: int):
    z_prev, z = Fraction(1), y0
    for m in range(n):
        if z == 0:
            return Crash(m)
        z_prev, z = z, z - R * z_prev
    return y0 if n == 0 else simplify(z / z_prev)


# ---------------------------------------------------------------------------
# topology


@dataclass(frozen=True)
class FsTopology:
    tag: str
    period: int | None = None
    limit: Scalar | None = None
    bound: int | None = None

    FINITE = "finite-globally-periodic"
    CONVERGENT = "convergent-sequence"
    DENSE = "dense-candidate"
    UNRESOLVED = "unresolved"


def root_of_unity_order(R, bound: int = DEFAULT_ROOT_BOUND) -> int | None:
    """Smallest ``m <= bound`` with ``(lam_+/lam_-)^m = 1`` for ``t^2 - t + R``, exactly.

    Uses the companion matrix ``M = [[1, -R], [1, 0]]``: ``M^m`` is a scalar
    multiple of the identity exactly when ``lam_+^m = lam_-^m``.
    """
    R = simplify(R)
    if not is_exact(R):
        raise ValueError("root-of-unity test needs an exact R")
    if 1 - 4 * R == 0:
        return None
    m11, m12, m21, m22 = Fraction(1), -R, Fraction(1), Fraction(0)
    p11, p12, p21, p22 = m11, m12, m21, m22
    for m in range(1, bound + 1):
        if p12 == 0 and p21 == 0 and p11 == p22:
            return m
        p11, p12, p21, p22 = (
            p11 * m11 + p12 * m21,
            p11 * m12 + p12 * m22,
            p21 * m11 + p22 * m21,
            p21 * m12 + p22 * m22,
        )
    return None


def riccati_fs_topology(R, bound: int = DEFAULT_ROOT_BOUND) -> FsTopology:
    """Shape of the forbidden set of ``y_{n+1} = 1 - R/y_n``.

    Real roots of ``t^2 - t + R``: the backward orbit of the pole converges to the
    root of smaller modulus.  Complex roots: finite iff their ratio is a root of
    unity.  For rational ``R`` the ratio ``e^{2i*theta}`` has
    ``2cos(2theta) = 1/R - 2``, which must be an integer for ``theta`` to be a
    rational multiple of pi; otherwise the set is reported as a dense candidate.
    """
    R = simplify(R)
    if R == 0:
        raise ValueError("R = 0 is not a proper normal form")
    if is_exact(R):
        real_roots = isinstance(R, Fraction) and 1 - 4 * R >= 0
    else:
        real_roots = is_real_scalar(R) and 1 - 4 * float(R.real if isinstance(R, complex) else R) >= -DEFAULT_TOL
    if real_roots:
        if isinstance(R, Fraction) and 1 - 4 * R == 0:
            return FsTopology(FsTopology.CONVERGENT, limit=Fraction(1, 2))
        lp, lm, _ = _lucas_roots(R if is_exact(R) else R)
        limit = lm if magnitude(lm) <= magnitude(lp) else lp
        if not is_exact(limit) and isinstance(limit, complex):
            limit = limit.real
        return FsTopology(FsTopology.CONVERGENT, limit=limit)
    if not is_exact(R):
        return FsTopology(FsTopology.UNRESOLVED, bound=bound)
    m = root_of_unity_order(R, bound)
    if m is not None:
        return FsTopology(FsTopology.FINITE, period=m)
    if isinstance(R, Fraction):
        t = 1 / R - 2
        if t not in (-1, 0, 1):
            return FsTopology(FsTopology.DENSE)
    return FsTopology(FsTopology.UNRESOLVED, bound=bound)


# ---------------------------------------------------------------------------
# order k


@dataclass(frozen=True)
class LinearRecurrence:
    """``z_{n+1} = c_1 z_n + c_2 z_{n-1} + ... + c_m z_{n-m+1}``."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(simplify(c) for c in self.coeffs)
        if not cs or cs[-1] == 0:
            raise ValueError("last coefficient must be nonzero")
        object.__setattr__(self, "coeffs", cs)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def next_value(self, window: Sequence):
        """Next term from the last ``order`` terms (oldest first)."""
        if len(window) != self.order:
            raise ValueError("window length must equal the order")
        total = 0
        for c, z in zip(self.coeffs, reversed(window)):
            total = total + c * z
        return total

    def run(self, init: Sequence, n: int) -> list:
        vals = list(init)
        for _ in range(n):
            vals.append(self.next_value(vals[-self.order:]))
        return vals


def riccati_k_map(coeffs: Sequence) -> RationalMap:
    """``x_{n+1} = a_0 + a_1/x_n + ... + a_k/(x_n ... x_{n-k+1})`` as a rational map."""
    a = [simplify(c) for c in coeffs]
    k = len(a) - 1
    if k < 1:
        raise ValueError("need at least a_0 and a_1")
    if a[k] == 0:
        raise ValueError("a_k must be nonzero")
    v = lag_names(k)
    xs = [Poly.var(f"x{j}", v) for j in range(k)]
    den = Poly.constant(1, v)
    for x in xs:
        den = den * x
    num = Poly.constant(0, v)
    for i, ai in enumerate(a):
        term = Poly.constant(ai, v)
        for x in xs[i:]:
            term = term * x
        num = num + term
    return RationalMap(num, den, k)


@dataclass
class ZeroSetCoeffs:
    """Linear forms of ``y_n`` in the seed monomials, for ``n = -k+1 .. N``.

    The state is ``(x_{-k+1}, ..., x_0)`` and the seeds are ``y_{-k} = 1`` and
    ``y_j = x_{-k+1} * ... * x_j``.  ``monomials`` lists the seeds newest first,
    ``y_0, y_{-1}, ..., y_{-k}``, so the last entry is the constant 1.
    """

    recurrence: LinearRecurrence
    order: int
    monomials: tuple
    layers: list

    def form(self, n: int) -> Poly:
        for m, coeffs in self.layers:
            if m == n:
                total = Poly.constant(0, lag_names(self.order))
                for c, mono in zip(coeffs, self.monomials):
                    total = total + mono * c
                return total
        raise KeyError(n)

    def verify_recurrence(self) -> bool:
        """Coefficient vectors obey the linear recurrence, checked by substitution."""
        k1 = self.recurrence.order
        seeds = {-self.order + j: tuple(Fraction(int(i == self.order - j)) for i in range(k1)) for j in range(k1)}
        table = dict(seeds)
        table.update({m: c for m, c in self.layers})
        for m, coeffs in self.layers:
            if m - k1 not in table:
                continue
            window = [table[m - k1 + j] for j in range(k1)]
            expect = tuple(
                simplify(sum((c * w[i] for c, w in zip(self.recurrence.coeffs, reversed(window))), Fraction(0)))
                for i in range(k1)
            )
            if expect != tuple(coeffs):
                return False
        return True

    def crash_bound(self, n: int) -> int:
        """Points on layer ``n`` crash at step ``<= max(n, 0)``."""
        return max(n, 0)

    def hypersurfaces(self) -> HypersurfaceFamily:
        layers = [(m, self.form(m)) for m, _ in self.layers]
        return HypersurfaceFamily(
            lag_names(self.order), layers, f"riccati{self.order}-zero-set",
            [self.crash_bound(m) for m, _ in self.layers],
        )


def riccati_k_fs(coeffs: Sequence, N: int) -> ZeroSetCoeffs:
    """Zero-set layers of the order-k Riccati equation with ``coeffs = (a_0, ..., a_k)``."""
    a = tuple(simplify(c) for c in coeffs)
    k = len(a) - 1
    if k < 1:
        raise ValueError("need at least a_0 and a_1")
    if a[k] == 0:
        raise ValueError("a_k = 0 lowers the order; use the lower-order equation")
    rec = LinearRecurrence(a)
    v = lag_names(k)
    # seed monomials, newest first: y_0, y_{-1}, ..., y_{-k} = 1
    monos = []
    for j in range(0, -k - 1, -1):
        p = Poly.constant(1, v)
        for i in range(-k + 1, j + 1):
            p = p * Poly.var(f"x{-i}", v)
        monos.append(p)
    width = k + 1
    # coefficient vector of y_j for the seeds: unit vector at position -j
    vecs = {j: tuple(Fraction(int(i == -j)) for i in range(width)) for j in range(-k, 1)}
    layers = [(j, vecs[j]) for j in range(-k + 1, 1)]
    for n in range(0, N):
        window = [vecs[n - k + i] for i in range(width)]
        nxt = tuple(
            simplify(sum((c * w[i] for c, w in zip(a, reversed(window))), Fraction(0)))
            for i in range(width)
        )
        vecs[n + 1] = nxt
        layers.append((n + 1, nxt))
    return ZeroSetCoeffs(rec, k, tuple(monos), layers)


def riccati2_fs(a, b, c, N: int) -> ZeroSetCoeffs:
    """Hyperbola layers ``beta_1 uv + beta_2 u + beta_3 = 0`` with ``(u, v) = (x_{-1}, x_0)``."""
    if simplify(c) == 0:
        raise ValueError("c = 0 lowers the order; use the order-1 equation")
    return riccati_k_fs((a, b, c), N)


def riccati2_triples(zs: ZeroSetCoeffs) -> list[tuple[int, tuple]]:
    """``(n, (beta_1, beta_2, beta_3))`` for each layer of an order-2 zero set."""
    if zs.order != 2:
        raise ValueError("triples only exist for order 2")
    return [(n, tuple(c)) for n, c in zs.layers]


def riccati1_params(m) -> RiccatiParams1 | None:
    """Coefficients of an order-one map of Möbius shape, or ``None``."""
    m = m.map if isinstance(m, DifferenceEquation) else m
    if m.order != 1 or m.params or m.numerator.degree() > 1 or m.denominator.degree() > 1:
        return None
    num = m.numerator.univariate_coeffs("x0") + [0, 0]
    den = m.denominator.univariate_coeffs("x0") + [0, 0]
    return RiccatiParams1(num[0], num[1], den[0], den[1])


def riccati_k_coeffs(m) -> tuple | None:
    """``(a_0, ..., a_k)`` when the map is an order-k Riccati map, else ``None``."""
    m = m.map if isinstance(m, DifferenceEquation) else m
    k = m.order
    if k < 2 or m.params:
        return None
    names = lag_names(k)
    full = tuple(1 for _ in names)
    lead = m.denominator.coeff(full)
    if lead == 0:
        return None
    coeffs = []
    for i in range(k + 1):
        # a_i multiplies x_i * ... * x_{k-1}; names run oldest first
        exp = tuple(1 if int(v[1:]) >= i else 0 for v in names)
        coeffs.append(simplify(m.numerator.coeff(exp) / lead))
    if coeffs[k] == 0:
        return None
    try:
        cand = riccati_k_map(coeffs)
    except ValueError:
        return None
    return tuple(coeffs) if cand == m else None
