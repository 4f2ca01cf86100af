"""Exact Möbius transformations ``T(x) = (a*x + b) / (c*x + d)``."""
from __future__ import annotations

from dataclasses import dataclass

from .poly import Poly
from .scalars import Scalar, is_exact, simplify


class Infinity:
    """The point at infinity of the projective line."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "oo"


INF = Infinity()


@dataclass(frozen=True)
class MobiusTransform:
    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, simplify(getattr(self, name)))
        if self.det == 0:
            raise ValueError("Möbius transformation with ad - bc = 0 is not invertible")

    @classmethod
    def identity(cls) -> "MobiusTransform":
        return cls(1, 0, 0, 1)

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def __call__(self, x):
        """Apply ``T``; the pole maps to :data:`INF` and ``INF`` to ``a/c``."""
        if x is INF:
            return INF if self.c == 0 else simplify(self.a / self.c)
        den = self.c * x + self.d
        if den == 0:
            return INF
        v = (self.a * x + self.b) / den
        return simplify(v) if is_exact(v) else v

    apply = __call__

    def inverse(self) -> "MobiusTransform":
        return MobiusTransform(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MobiusTransform") -> "MobiusTransform":
        """``self ∘ other``."""
        return MobiusTransform(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    __matmul__ = compose

    def normalized(self) -> tuple:
        """Coefficients scaled so the first nonzero one is 1 (projective class)."""
        coeffs = (self.a, self.b, self.c, self.d)
        lead = next(x for x in coeffs if x != 0)
        return tuple(simplify(x / lead) for x in coeffs)

    def same_map(self, other: "MobiusTransform") -> bool:
        return self.normalized() == other.normalized()

    def is_identity(self) -> bool:
        return self.same_map(MobiusTransform.identity())

    @property
    def pole(self):
        """Point sent to infinity (``INF`` if ``T`` is affine)."""
        return INF if self.c == 0 else simplify(-self.d / self.c)

    def as_polys(self, variable: str, variables) -> tuple[Poly, Poly]:
        x = Poly.var(variable, variables)
        return x * self.a + self.b, x * self.c + self.d

    def __str__(self):
        return f"({self.a}*x + {self.b})/({self.c}*x + {self.d})"


def mobius_apply(T: MobiusTransform, x):
    return T(x)


def mobius_inverse(T: MobiusTransform) -> MobiusTransform:
    return T.inverse()


def mobius_compose(T: MobiusTransform, U: MobiusTransform) -> MobiusTransform:
    return T.compose(U)
