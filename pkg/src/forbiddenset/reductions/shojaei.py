"""Forbidden set of ``x_{n+1} = alpha x_{n-k} / (beta + gamma x_n ... x_{n-k})``.

The product ``z_n = x_n ... x_{n-k}`` satisfies ``z_{n+1} = alpha z_n / (beta +
gamma z_n)``, so the forbidden set is a union of generalized hyperbolas
``x_{-k} ... x_0 = r_n`` with ``r_n = -beta / (gamma (1 + c + ... + c^n))``
and ``c = alpha / beta``.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..algebra.scalars import is_exact, simplify
from ..fsdesc import ProductHypersurfaceFamily

DEFAULT_ROOT_BOUND = 120


@dataclass(frozen=True)
class DegenerateFs:
    """A parameter choice where the product reduction does not apply.

    ``tag`` is ``"empty"`` (gamma = 0), ``"zero-component"`` (beta = 0: points
    with a zero entry) or ``"trivial"`` (alpha = 0: only ``prod = -beta/gamma``).
    """

    tag: str
    surface: object = None
    order: int = 0
    generator = "shojaei-degenerate"

    @property
    def kind(self) -> str:
        return f"degenerate-{self.tag}"

    def records(self):
        from ..fsdesc import FsRecord
        from ..algebra.scalars import format_scalar

        if self.tag == "trivial":
            lhs = "*".join(f"x{j}" for j in range(self.order - 1, -1, -1))
            return [FsRecord("shojaei-degenerate", 0, None, f"{lhs} = {format_scalar(self.surface)}", 0)]
        if self.tag == "zero-component":
            return [FsRecord("shojaei-degenerate", 0, None, f"x{j} = 0", None) for j in range(self.order)]
        return []


def scalar_root_order(c, bound: int = DEFAULT_ROOT_BOUND) -> int | None:
    """Smallest ``m <= bound`` with ``c^m = 1`` (exact), else ``None``."""
    c = simplify(c)
    if not is_exact(c):
        raise ValueError("root-of-unity test needs an exact scalar")
    p = c
    for m in range(1, bound + 1):
        if p == 1:
            return m
        p = simplify(p * c)
    return None


def shojaei_fs(alpha, beta, gamma, k: int, N: int, bound: int = DEFAULT_ROOT_BOUND):
    """Product hypersurfaces up to depth ``N``, or a :class:`DegenerateFs`.

    Surface ``n`` crashes at step ``n``.  When ``c`` is a root of unity of order
    ``m >= 2`` the partial sums vanish at ``n = m - 1`` and the family is finite
    (``n = 0, ..., m - 2``) whatever ``N`` is.
    """
    alpha, beta, gamma = (simplify(x) for x in (alpha, beta, gamma))
    order = k + 1
    if beta == 0 and gamma == 0:
        raise ValueError("beta and gamma cannot both vanish")
    if gamma == 0:
        return DegenerateFs("empty", order=order)
    if beta == 0:
        return DegenerateFs("zero-component", order=order)
    if alpha == 0:
        return DegenerateFs("trivial", simplify(-beta / gamma), order)
    c = simplify(alpha / beta)
    m = scalar_root_order(c, bound) if is_exact(c) else None
    finite = m is not None and m >= 2
    last = m - 2 if finite else N
    constants = []
    S, power = 0, 1
    for n in range(last + 1):
        S = simplify(S + power)
        power = simplify(power * c)
        constants.append((n, simplify(-beta / (gamma * S))))
    tag = "shojaei-finite" if finite else "shojaei-countable"
    return ProductHypersurfaceFamily(order, constants, tag, finite)


def product_crash_step(de, family: ProductHypersurfaceFamily, n: int, rng, horizon: int | None = None):
    """Crash step of a random exact point on surface ``n`` (oracle helper)."""
    from ..algebra.maps import crash_step
    from ..sampling import random_point

    r = dict(family.constants)[n]
    pt = random_point(rng, family.order - 1)
    prod = 1
    for v in pt:
        prod = prod * v
    pt.append(simplify(r / prod))
    return crash_step(de, pt, horizon if horizon is not None else n + 2)
