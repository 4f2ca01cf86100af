"""Sparse multivariate polynomials over exact or floating scalars."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

from .scalars import QuadNumber, Scalar, format_scalar, is_exact, magnitude, simplify

# Above this total degree, fraction reduction only strips scalar content.
GCD_DEGREE_BOUND = 400


class Poly:
    """Polynomial as a map from exponent tuples to nonzero coefficients.

    ``variables`` fixes the meaning of each exponent slot.  Instances are treated
    as immutable.
    """

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, Scalar] | None = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean = {}
        for exp, c in (terms or {}).items():
            if len(exp) != n:
                raise ValueError(f"exponent {exp} does not match {n} variables")
            c = simplify(c)
            if c != 0:
                clean[tuple(exp)] = c
        self.terms = clean
        self._hash = None

    # constructors ---------------------------------------------------------
    @classmethod
    def constant(cls, c, variables: Sequence[str]) -> "Poly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> "Poly":
        variables = tuple(variables)
        exp = tuple(1 if v == name else 0 for v in variables)
        if sum(exp) != 1:
            raise ValueError(f"unknown variable {name!r}")
        return cls(variables, {exp: 1})

    def zero(self) -> "Poly":
        return Poly(self.variables)

    def one(self) -> "Poly":
        return Poly.constant(1, self.variables)

    # basic queries ----------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Scalar:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: str | int) -> int:
        i = var if isinstance(var, int) else self.variables.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def coeff(self, exp: Sequence[int]) -> Scalar:
        return self.terms.get(tuple(exp), Fraction(0))

    def used_variables(self) -> tuple[str, ...]:
        return tuple(v for i, v in enumerate(self.variables) if any(e[i] for e in self.terms))

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.terms.values())

    def is_rational(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.terms.values())

    def leading(self) -> tuple[tuple, Scalar]:
        """Leading term in graded-lex order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self.terms, key=lambda e: (sum(e), e))
        return exp, self.terms[exp]

    def num_terms(self) -> int:
        return len(self.terms)

    # variable bookkeeping -------------------------------------------------
    def with_variables(self, variables: Sequence[str]) -> "Poly":
        """Re-express in another variable list (must contain every used variable)."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        idx = {v: i for i, v in enumerate(variables)}
        out = {}
        for exp, c in self.terms.items():
            new = [0] * len(variables)
            for v, e in zip(self.variables, exp):
                if e:
                    if v not in idx:
                        raise ValueError(f"variable {v!r} missing from target ring")
                    new[idx[v]] = e
            out[tuple(new)] = c
        return Poly(variables, out)

    def rename(self, mapping: Mapping[str, str]) -> "Poly":
        return Poly(tuple(mapping.get(v, v) for v in self.variables), self.terms)

    def _align(self, other) -> tuple["Poly", "Poly"]:
        if not isinstance(other, Poly):
            return self, Poly.constant(other, self.variables)
        if other.variables == self.variables:
            return self, other
        merged = self.variables + tuple(v for v in other.variables if v not in self.variables)
        return self.with_variables(merged), other.with_variables(merged)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        a, b = self._align(other)
        out = dict(a.terms)
        for exp, c in b.terms.items():
            out[exp] = out.get(exp, 0) + c
        return Poly(a.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.variables, {e: c * other for e, c in self.terms.items()})
        a, b = self._align(other)
        out: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(a.variables, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if not other.is_constant():
                raise TypeError("polynomial division by a non-constant; use RationalFunction")
            other = other.constant_value()
        return self * (1 / simplify(other) if is_exact(other) else 1.0 / other)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = self.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            a, b = self._align(other)
            return a.terms == b.terms
        if isinstance(other, (int, Fraction, float, complex, QuadNumber)):
            return self.terms == Poly.constant(other, self.variables).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            used = self.used_variables()
            p = self.with_variables(used) if used != self.variables else self
            self._hash = hash((p.variables, frozenset(p.terms.items())))
        return self._hash

    # evaluation -----------------------------------------------------------
    def evaluate(self, point: Sequence) -> Scalar:
        return self.evaluate_scaled(point)[0]

    __call__ = evaluate

    def evaluate_scaled(self, point: Sequence) -> tuple[Scalar, float]:
        """Value and the sum of term magnitudes (scale for float zero tests)."""
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} values, got {len(point)}")
        exact = all(is_exact(x) for x in point)
        powers: dict = {}
        total = Fraction(0) if exact else 0.0
        scale = 0.0
        for exp, c in self.terms.items():
            t = c
            for i, e in enumerate(exp):
                if e:
                    key = (i, e)
                    if key not in powers:
                        powers[key] = point[i] ** e
                    t = t * powers[key]
            total = total + t
            if not exact:
                scale += magnitude(t)
        return simplify(total) if exact else total, scale

    def substitute(self, values: Mapping[str, Scalar]) -> "Poly":
        """Partially evaluate: plug scalars in for some variables (they stay in the ring)."""
        idx = {self.variables.index(v): x for v, x in values.items() if v in self.variables}
        out: dict = {}
        for exp, c in self.terms.items():
            t = c
            new = list(exp)
            for i, x in idx.items():
                if exp[i]:
                    t = t * x ** exp[i]
                    new[i] = 0
            key = tuple(new)
            out[key] = out.get(key, 0) + t
        return Poly(self.variables, out)

    def to_float(self) -> "Poly":
        def conv(c):
            if isinstance(c, QuadNumber):
                z = c.to_complex()
                return z.real if z.imag == 0 else z
            return float(c) if not isinstance(c, complex) else c

        return Poly(self.variables, {e: conv(c) for e, c in self.terms.items()})

    # content --------------------------------------------------------------
    def primitive(self) -> tuple[Scalar, "Poly"]:
        """Split off scalar content.

        Rational polynomials become integer polynomials with coprime coefficients and a
        positive leading coefficient; other exact polynomials are made monic.
        """
        if not self.terms:
            return Fraction(0), self
        _, lc = self.leading()
        if self.is_rational():
            coeffs = list(self.terms.values())
            den = reduce(lambda x, y: x * y // math.gcd(x, y), (c.denominator for c in coeffs), 1)
            num = reduce(math.gcd, (c.numerator for c in coeffs), 0)
            content = Fraction(num, den)
            if lc < 0:
                content = -content
        elif self.is_exact():
            content = lc
        else:
            return Fraction(1), self
        return content, self * (1 / content)

    # univariate helpers --------------------------------------------------
    def univariate_coeffs(self, var: str | int) -> list[Scalar]:
        """Coefficients ``[c0, c1, ...]`` in one variable (others must be absent)."""
        i = var if isinstance(var, int) else self.variables.index(var)
        deg = max(self.degree_in(i), 0)
        out = [Fraction(0)] * (deg + 1)
        for exp, c in self.terms.items():
            if any(e for j, e in enumerate(exp) if j != i):
                raise ValueError("polynomial is not univariate in the requested variable")
            out[exp[i]] = c
        return out

    def coeffs_in(self, var: str | int) -> list["Poly"]:
        """Coefficients (as polynomials in the remaining slots) of powers of ``var``."""
        i = var if isinstance(var, int) else self.variables.index(var)
        deg = max(self.degree_in(i), 0)
        parts: list[dict] = [dict() for _ in range(deg + 1)]
        for exp, c in self.terms.items():
            e = list(exp)
            k = e[i]
            e[i] = 0
            parts[k][tuple(e)] = c
        return [Poly(self.variables, p) for p in parts]

    # text -----------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for exp in sorted(self.terms, key=lambda e: (sum(e), e), reverse=True):
            c = self.terms[exp]
            mono = "*".join(
                (v if e == 1 else f"{v}^{e}") for v, e in zip(self.variables, exp) if e
            )
            cs = format_scalar(c)
            if isinstance(c, QuadNumber) and c.a != 0 and c.b != 0:
                cs = f"({cs})"
            if mono:
                if cs == "1":
                    term = mono
                elif cs == "-1":
                    term = "-" + mono
                else:
                    term = f"{cs}*{mono}"
            else:
                term = cs
            pieces.append(term)
        text = pieces[0]
        for p in pieces[1:]:
            text += (" - " + p[1:]) if p.startswith("-") else (" + " + p)
        return text

    def __repr__(self):
        return f"Poly({str(self)!r}, vars={self.variables})"


# ---------------------------------------------------------------------------
# sympy bridge (multivariate gcd and factorisation over Q)


def _sympy_ring(variables: Sequence[str]):
    from sympy import QQ
    from sympy.polys.rings import ring

    return ring(",".join(variables) if variables else "_z", QQ)


def to_sympy(p: Poly, R=None):
    from sympy import QQ

    if R is None:
        R = _sympy_ring(p.variables)[0]
    return R.from_dict({e: QQ(c.numerator, c.denominator) for e, c in p.terms.items()})


def from_sympy(el, variables: Sequence[str]) -> Poly:
    return Poly(variables, {e: Fraction(int(c.numerator), int(c.denominator)) for e, c in el.items()})


def univariate_gcd(a: Poly, b: Poly, var: str | int) -> Poly:
    """Monic gcd by the Euclidean algorithm over the coefficient field."""
    i = var if isinstance(var, int) else a.variables.index(var)
    x = a.univariate_coeffs(i)
    y = b.univariate_coeffs(i)

    def trim(c):
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        return c

    x, y = trim(list(x)), trim(list(y))
    while not (len(y) == 1 and y[0] == 0):
        # remainder of x / y
        r = list(x)
        while len(r) >= len(y) and not (len(r) == 1 and r[0] == 0):
            q = r[-1] / y[-1]
            shift = len(r) - len(y)
            for j, c in enumerate(y):
                r[shift + j] = r[shift + j] - q * c
            r.pop()
            if not r:
                r = [Fraction(0)]
            trim(r)
        x, y = y, r
    lead = x[-1]
    exps = {}
    for k, c in enumerate(x):
        if c != 0:
            e = [0] * a.nvars
            e[i] = k
            exps[tuple(e)] = c / lead
    return Poly(a.variables, exps)


def _univariate_divide(a: Poly, g: Poly, i: int) -> Poly:
    x = a.univariate_coeffs(i)
    y = g.univariate_coeffs(i)
    while len(y) > 1 and y[-1] == 0:
        y.pop()
    r = list(x)
    q = [Fraction(0)] * max(len(r) - len(y) + 1, 1)
    while len(r) >= len(y) and any(c != 0 for c in r):
        coef = r[-1] / y[-1]
        shift = len(r) - len(y)
        q[shift] = coef
        for j, c in enumerate(y):
            r[shift + j] = r[shift + j] - coef * c
        r.pop()
    terms = {}
    for k, c in enumerate(q):
        if c != 0:
            e = [0] * a.nvars
            e[i] = k
            terms[tuple(e)] = c
    return Poly(a.variables, terms)


def reduce_fraction(num: Poly, den: Poly, degree_bound: int = GCD_DEGREE_BOUND) -> tuple[Poly, Poly]:
    """Cancel common factors and normalise so the denominator's leading coefficient is 1.

    Univariate fractions are always fully reduced; multivariate rational ones go
    through a full gcd below ``degree_bound``; otherwise only scalar content is removed.
    """
    if den.is_zero():
        raise ZeroDivisionError("zero denominator polynomial")
    num, den = num._align(den)
    if num.is_zero():
        return num, den.one()
    used = tuple(v for v in num.variables if v in set(num.used_variables()) | set(den.used_variables()))
    exact = num.is_exact() and den.is_exact()
    if exact and len(used) == 1:
        i = num.variables.index(used[0])
        g = univariate_gcd(num, den, i)
        if g.degree() > 0:
            num = _univariate_divide(num, g, i)
            den = _univariate_divide(den, g, i)
    elif (
        len(used) > 1
        and num.is_rational()
        and den.is_rational()
        and max(num.degree(), den.degree()) <= degree_bound
    ):
        R = _sympy_ring(used)[0]
        a = to_sympy(num.with_variables(used), R)
        b = to_sympy(den.with_variables(used), R)
        g = a.gcd(b)
        if not g.is_ground:
            a = a.quo(g)
            b = b.quo(g)
            num = from_sympy(a, used).with_variables(num.variables)
            den = from_sympy(b, used).with_variables(den.variables)
    if exact:
        _, lc = den.leading()
        num = num * (1 / lc)
        den = den * (1 / lc)
    return num, den


def factor_rational(p: Poly) -> list[tuple[Poly, int]]:
    """Irreducible factors over Q as primitive integer polynomials (constants dropped)."""
    used = p.used_variables()
    if not used:
        return []
    if not p.is_rational():
        raise ValueError("factorisation is only supported over Q")
    q = p.with_variables(used).primitive()[1]
    try:
        import flint
    except ImportError:  # pragma: no cover - flint is a declared dependency
        R = _sympy_ring(used)[0]
        facs = [(from_sympy(f, used), m) for f, m in to_sympy(q, R).factor_list()[1]]
    else:
        ctx = flint.fmpz_mpoly_ctx.get(tuple(used), "lex")
        f = ctx.from_dict({e: int(c) for e, c in q.terms.items()})
        facs = [
            (Poly(used, {tuple(map(int, e)): Fraction(int(c)) for e, c in g.to_dict().items()}), int(m))
            for g, m in f.factor()[1]
        ]
    out = []
    for f, m in facs:
        f = f.with_variables(p.variables)
        if f.is_constant():
            continue
        out.append((f.primitive()[1], m))
    out.sort(key=lambda fm: (fm[0].degree(), str(fm[0])))
    return out


def monomial_product(variables: Sequence[str], names: Iterable[str]) -> Poly:
    p = Poly.constant(1, variables)
    for n in names:
        p = p * Poly.var(n, variables)
    return p
