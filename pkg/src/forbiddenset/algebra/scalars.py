"""Exact and floating scalars.

A scalar is one of

* ``fractions.Fraction`` (or ``int``): exact rational,
* :class:`QuadNumber`: exact element ``a + b*sqrt(d)`` of a quadratic field,
  with ``d = -1`` giving the Gaussian rationals,
* ``float`` / ``complex``: binary floating point.

Exact op exact stays exact; anything mixed with a float becomes a float.
"""
from __future__ import annotations

import cmath
import math
import numbers
from fractions import Fraction
from typing import Union

Scalar = Union[int, Fraction, "QuadNumber", float, complex]

REAL = "R"
COMPLEX = "C"


def _squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(s, r)`` with ``n = s * r**2`` and ``s`` squarefree."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    r = 1
    f = 2
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
            r *= f
        f += 1
    return sign * n, r


class QuadNumber:
    """Exact ``a + b*sqrt(d)`` with rational ``a, b`` and squarefree integer ``d``."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d: int = -1):
        a = Fraction(a)
        b = Fraction(b)
        if not isinstance(d, int):
            d = Fraction(d)
            # sqrt(p/q) = sqrt(p*q)/q
            num = d.numerator * d.denominator
            b = b / d.denominator
            d = num
        if d == 0 or d == 1:
            raise ValueError("quadratic extension needs a non-square radicand")
        s, r = _squarefree_part(d)
        if s == 1:
            raise ValueError(f"{d} is a perfect square")
        self.a = a
        self.b = b * r
        self.d = s

    # construction helpers -------------------------------------------------
    @classmethod
    def sqrt(cls, d) -> "QuadNumber":
        return cls(0, 1, d)

    def _coerce(self, other):
        if isinstance(other, QuadNumber):
            if other.d != self.d:
                raise ValueError(f"cannot mix sqrt({self.d}) and sqrt({other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadNumber(other, 0, self.d)
        return None

    def _float_like(self, other):
        return isinstance(other, (float, complex)) and not isinstance(other, bool)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if self._float_like(other):
            return self.to_complex() + other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadNumber(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadNumber(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if self._float_like(other):
            return self.to_complex() - other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadNumber(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if self._float_like(other):
            return self.to_complex() * other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadNumber(
            self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.d
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadNumber":
        return QuadNumber(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> "QuadNumber":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero quadratic number")
        return QuadNumber(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if self._float_like(other):
            return self.to_complex() / other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        if self._float_like(other):
            return other / self.to_complex()
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadNumber(1, 0, self.d)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparisons ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QuadNumber):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, (float, complex)):
            return self.to_complex() == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    # views ----------------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.b == 0

    @property
    def is_real(self) -> bool:
        return self.b == 0 or self.d > 0

    def to_complex(self) -> complex:
        if self.d < 0:
            return complex(float(self.a), float(self.b) * math.sqrt(-self.d))
        return complex(float(self.a) + float(self.b) * math.sqrt(self.d), 0.0)

    def __complex__(self):
        return self.to_complex()

    def __float__(self):
        if not self.is_real:
            raise TypeError("non-real quadratic number")
        return self.to_complex().real

    def __repr__(self):
        return f"QuadNumber({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return format_scalar(self)


def gaussian(re, im) -> Scalar:
    """Exact Gaussian rational ``re + im*i`` (plain Fraction when ``im == 0``)."""
    if Fraction(im) == 0:
        return Fraction(re)
    return QuadNumber(re, im, -1)


def root_of_unity(m: int) -> Scalar:
    """Primitive ``m``-th root ``exp(2*pi*i/m)`` exactly, for ``m`` in {1, 2, 3, 4, 6}."""
    table = {
        1: Fraction(1),
        2: Fraction(-1),
        3: QuadNumber(Fraction(-1, 2), Fraction(1, 2), -3),
        4: QuadNumber(0, 1, -1),
        6: QuadNumber(Fraction(1, 2), Fraction(1, 2), -3),
    }
    if m not in table:
        raise ValueError(f"no exact quadratic representation of a primitive {m}-th root of unity")
    return table[m]


def simplify(x: Scalar) -> Scalar:
    """Collapse ints to Fractions and rational QuadNumbers to Fractions."""
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, QuadNumber) and x.b == 0:
        return x.a
    return x


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QuadNumber)) and not isinstance(x, bool)


def is_real_scalar(x) -> bool:
    if isinstance(x, QuadNumber):
        return x.is_real
    if isinstance(x, complex):
        return x.imag == 0
    return True


def to_complex(x) -> complex:
    if isinstance(x, QuadNumber):
        return x.to_complex()
    return complex(x)


def to_float(x) -> float:
    if isinstance(x, QuadNumber):
        return float(x)
    if isinstance(x, complex):
        if x.imag != 0:
            raise TypeError("complex value has no real float")
        return x.real
    return float(x)


def magnitude(x) -> float:
    if isinstance(x, QuadNumber):
        return abs(x.to_complex())
    return abs(float(x)) if not isinstance(x, complex) else abs(x)


def is_zero(x, tol: float = 1e-12, scale: float = 1.0) -> bool:
    """Exact test on exact scalars; ``|x| <= tol*max(1, scale)`` on floats."""
    if is_exact(x):
        return x == 0
    return magnitude(x) <= tol * max(1.0, scale)


def exact_sqrt(q: Fraction) -> Scalar:
    """``sqrt(q)`` as an exact scalar (Fraction when q is a rational square)."""
    q = Fraction(q)
    if q == 0:
        return Fraction(0)
    sign = 1 if q > 0 else -1
    num, den = abs(q.numerator), q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        root = Fraction(rn, rd)
        return root if sign > 0 else QuadNumber(0, root, -1)
    return QuadNumber(0, 1, q)


def parse_scalar(text: str) -> Scalar:
    """Parse ``"3"``, ``"-1/2"``, ``"0.25"``, ``"1e-3"``, ``"1/2+3/4*sqrt(-3)"``, ``"2-i"``."""
    from .textformat import parse_scalar_expr

    return parse_scalar_expr(text)


def format_scalar(x) -> str:
    """Stable text form; exact values round-trip through :func:`parse_scalar`."""
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, QuadNumber):
        if x.b == 0:
            return str(x.a)
        rad = "i" if x.d == -1 else f"sqrt({x.d})"
        coef = "" if x.b == 1 else ("-" if x.b == -1 else f"{x.b}*")
        tail = f"{coef}{rad}"
        if x.a == 0:
            return tail
        if tail.startswith("-"):
            return f"{x.a}{tail}"
        return f"{x.a}+{tail}"
    if isinstance(x, complex):
        return repr(x)
    if isinstance(x, numbers.Real):
        return repr(float(x))
    raise TypeError(f"not a scalar: {x!r}")


def scalar_to_json(x):
    """JSON-friendly form: strings for exact values, numbers / [re, im] for floats."""
    if is_exact(x):
        return format_scalar(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return float(x)


def scalar_from_json(v):
    if isinstance(v, str):
        return parse_scalar(v)
    if isinstance(v, list):
        return complex(v[0], v[1])
    return float(v)


def csqrt(z) -> complex:
    return cmath.sqrt(complex(z))
