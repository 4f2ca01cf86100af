"""Symbolic words for the preimages of the pole 1 of ``f(x) = 1/(x^2 - 1)``.

The inverse branches are ``h_+(x) = sqrt(1/x + 1)`` and ``h_-(x) = -sqrt(1/x + 1)``.
A word ``a_1 ... a_n`` stands for ``a_1(a_2(...a_n(1)))``.  Real words are those
whose radicand ``1/x + 1`` is nonnegative at every application; this is decided
from the values, not from a combinatorial rule on the letters.
"""
from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from functools import lru_cache

import flint
import numpy as np

COMPLEX_MODE = "complex"
REAL_MODE = "real"


def f(x):
    return 1 / (x * x - 1)


def h(sign: int, x):
    r = 1 / x + 1
    return sign * cmath.sqrt(r)


@dataclass(frozen=True)
class SymbolicWord:
    letters: tuple[int, ...]
    value: complex
    real: bool

    @property
    def depth(self) -> int:
        return len(self.letters)

    def label(self) -> str:
        return "".join("h+" if s > 0 else "h-" for s in self.letters)


def evaluate_word(letters) -> tuple[complex, bool]:
    """Value of the word and whether every radicand stayed nonnegative."""
    x = 1.0 + 0j
    real = True
    for s in reversed(letters):
        r = 1 / x + 1
        real = real and r.imag == 0 and r.real >= 0
        x = s * cmath.sqrt(r)
        if real:
            x = complex(x.real, 0.0)
    return x, real


def symbolic_words(depth: int, mode: str = COMPLEX_MODE, exact_depth: bool = False) -> list[SymbolicWord]:
    """All words of length ``1..depth`` (or exactly ``depth``), in a fixed order.

    ``mode="real"`` keeps the words whose every prefix value is real.  Values
    are computed by extending shorter words one letter at a time on the left.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if mode not in (COMPLEX_MODE, REAL_MODE):
        raise ValueError(f"unknown mode {mode!r}")
    out = []
    level = [((), 1.0 + 0j, True)]
    for n in range(1, depth + 1):
        nxt = []
        for letters, x, real in level:
            r = 1 / x + 1
            still_real = real and abs(r.imag) == 0 and r.real >= 0
            root = cmath.sqrt(r)
            for s in (1, -1):
                v = s * root
                if still_real:
                    v = complex(v.real, 0.0)
                nxt.append(((s,) + letters, v, still_real))
        level = nxt
        if mode == REAL_MODE:
            level = [w for w in level if w[2]]
        if not exact_depth or n == depth:
            out.extend(SymbolicWord(l, v, r) for l, v, r in level)
    return out


def min_pairwise_distance(values) -> float:
    z = np.asarray(values, dtype=np.complex128)
    best = np.inf
    for i in range(len(z) - 1):
        d = np.abs(z[i + 1:] - z[i])
        if d.size:
            best = min(best, float(d.min()))
    return best


def pole_hit_step(x: complex, max_steps: int, tol: float = 1e-9) -> int | None:
    """First ``n`` with ``|x_n^2 - 1| <= tol`` along the forward orbit (crash step)."""
    for n in range(max_steps + 1):
        if abs(x * x - 1) <= tol:
            return n
        x = f(x)
    return None


@lru_cache(maxsize=None)
def _iterate_fraction(n: int):
    """``f^n = P/Q`` as coprime integer polynomials."""
    P, Q = flint.fmpz_poly([0, 1]), flint.fmpz_poly([1])
    for _ in range(n):
        P, Q = Q**2, P**2 - Q**2
        g = P.gcd(Q)
        if g.degree() > 0:
            P, Q = P // g, Q // g
    return P, Q


def real_preimages_oracle(n: int) -> list[float]:
    """Real ``x`` with ``f^n(x) = 1``, by certified root isolation (FLINT/Arb).

    Arb reports real roots with an exact zero imaginary part, so the real set
    is decided exactly; values are ball midpoints (radius near 1e-15).  Roots
    where an earlier iterate already hits a pole are removed.
    """
    P, Q = _iterate_fraction(n)
    cond = P - Q
    sqf = cond // cond.gcd(cond.derivative())
    roots = [z.real for z, _m in sqf.complex_roots() if z.imag == 0]
    good = []
    for ball in roots:
        r = float(ball.mid())
        v, ok = r, True
        for _ in range(n):
            if abs(v * v - 1) < 1e-9:
                ok = False
                break
            v = f(v)
        if ok:
            good.append(r)
    return sorted(good)


def corollary_rule(letters) -> bool:
    """The letter rule "no two consecutive h-" (kept for comparison only)."""
    return all(not (a < 0 and b < 0) for a, b in itertools.pairwise(letters))
