"""Random exact points for property checks."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .algebra.poly import Poly
from .algebra.scalars import simplify


def random_rational(rng: random.Random, max_num: int = 9, max_den: int = 9, nonzero: bool = True) -> Fraction:
    while True:
        q = Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den))
        if q != 0 or not nonzero:
            return q


def random_point(rng: random.Random, k: int, max_num: int = 9, max_den: int = 9, nonzero: bool = True) -> list:
    return [random_rational(rng, max_num, max_den, nonzero) for _ in range(k)]


def sample_on_form(form: Poly, rng: random.Random, max_num: int = 9, max_den: int = 9, attempts: int = 50):
    """A random exact point on ``{form = 0}``, solving for a variable of degree one.

    Other coordinates are random nonzero rationals.  Returns ``None`` when no
    variable enters linearly or every attempt degenerates.
    """
    names = form.variables
    linear = [v for v in reversed(names) if form.degree_in(v) == 1]
    if not linear:
        return None
    for _ in range(attempts):
        v = linear[rng.randrange(len(linear))]
        i = names.index(v)
        point = random_point(rng, len(names), max_num, max_den)
        vals = {n: point[j] for j, n in enumerate(names) if n != v}
        c0, c1 = (form.substitute(vals).coeffs_in(v) + [form.zero()])[:2]
        a = c1.constant_value()
        b = c0.constant_value()
        if a == 0:
            continue
        point[i] = simplify(-b / a)
        if point[i] == 0:
            continue
        return point
    return None


def sample_off_forms(forms: Sequence[Poly], rng: random.Random, k: int, max_num: int = 9, max_den: int = 9):
    """A random nonzero exact point avoiding every given hypersurface."""
    while True:
        p = random_point(rng, k, max_num, max_den)
        if all(f.evaluate(p) != 0 for f in forms):
            return p
