"""Forbidden hypersurfaces read off the denominators of the unfolding iterates."""
from __future__ import annotations

from ..algebra.maps import DEFAULT_TERM_BUDGET, RationalMap, TermBudgetExceeded, iterate_unfolding_symbolic, lag_names
from ..algebra.poly import Poly, factor_rational
from ..fsdesc import HypersurfaceFamily


def _normalize_sign(p: Poly) -> Poly:
    _, lc = p.leading()
    return -p if lc < 0 else p


def forbidden_curves(de, n: int, *, term_budget: int = DEFAULT_TERM_BUDGET) -> HypersurfaceFamily:
    """New irreducible denominator factors of ``F^1 .. F^n``, one layer per iterate.

    Layer ``i`` holds the factors first seen in the newest coordinate of
    ``F^i``; a point on it makes ``x_i`` undefined (crash step ``i - 1``).
    Factors free of the state variables (pure parameter factors) are not
    curves and are skipped.  On term-budget overflow the finished layers are
    returned with ``truncated`` set.
    """
    m = de.map if hasattr(de, "map") else de
    if not isinstance(m, RationalMap):
        raise TypeError("expected a RationalMap or DifferenceEquation")
    state = set(lag_names(m.order))
    truncated = False
    try:
        iterates = iterate_unfolding_symbolic(m, n, term_budget=term_budget)
    except TermBudgetExceeded as exc:
        iterates = exc.partial
        truncated = True
    seen: list[Poly] = []
    layers = []
    for i, comps in enumerate(iterates, start=1):
        for fac, _mult in factor_rational(comps[-1].den):
            if not state & set(fac.used_variables()):
                continue
            fac = _normalize_sign(fac)
            if fac in seen:
                continue
            seen.append(fac)
            layers.append((i, fac))
    return HypersurfaceFamily(
        m.variables,
        layers,
        "unfolding-denominators",
        [i - 1 for i, _ in layers],
        complete=False,
        truncated=truncated,
    )
