"""Matching equations against the family catalog and checking the result."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from ..algebra.maps import DEFAULT_TOL, DifferenceEquation, RationalMap, as_equation, iterate, lag_names
from ..algebra.scalars import COMPLEX, is_exact, simplify
from ..fsdesc import HypersurfaceFamily
from ..riccati import RiccatiParams1, mobius_backward_orbit
from ..sampling import random_point
from .changes import ChangeOfVariables
from .families import FamilyInstance, load_families
from .invariants import InvariantForm, SingularInit, invariant_constant, invariant_reduce


@dataclass
class ReductionResult:
    """A matched family: the change of variables and the equation it produces.

    For invariant families ``reduced`` is ``None`` and the reduced equation is
    built per orbit from the invariant's constant.
    """

    family: str
    params: dict
    source: RationalMap
    change: ChangeOfVariables
    reduced: RationalMap | None
    invariant: InvariantForm | None = None
    crash: str = "pole"

    def reduced_for(self, window: Sequence) -> RationalMap | None:
        """Reduced equation valid along the orbit starting at ``window``."""
        if self.invariant is None:
            return self.reduced
        C = invariant_constant(self.invariant, window)
        if isinstance(C, SingularInit):
            return None
        try:
            return invariant_reduce(self.invariant, C)
        except ValueError:
            return None

    @property
    def stride(self) -> int | None:
        """``s`` when the reduced equation is ``z_{n+1} = g(z_{n-s+1})``."""
        m = self.reduced
        if m is None:
            return None
        oldest = f"x{m.order - 1}"
        used = set(m.numerator.used_variables()) | set(m.denominator.used_variables())
        if not used <= {oldest}:
            return None
        if max(m.numerator.degree_in(oldest), m.denominator.degree_in(oldest)) > 1:
            return None
        return m.order

    def stride_map(self) -> RiccatiParams1 | None:
        """The Möbius map ``g`` of the strided recurrence."""
        s = self.stride
        if s is None:
            return None
        v = f"x{s - 1}"
        n0, n1 = (p.constant_value() for p in (self.reduced.numerator.coeffs_in(v) + [self.reduced.numerator.zero()])[:2])
        d0, d1 = (p.constant_value() for p in (self.reduced.denominator.coeffs_in(v) + [self.reduced.denominator.zero()])[:2])
        return RiccatiParams1(n0, n1, d0, d1)

    def describe(self) -> str:
        params = ", ".join(f"{k} = {v}" for k, v in self.params.items())
        red = str(self.reduced) if self.reduced is not None else "per-orbit (invariant)"
        return f"{self.family} ({params}); change {self.change.kind}{self.change.arg}; reduced {red}"


@dataclass(frozen=True)
class NoMatch:
    tried: tuple[str, ...] = ()
    reason: str = "no catalog family matches"


def _result_from_instance(inst: FamilyInstance, values: dict, m: RationalMap) -> ReductionResult:
    inv = inst.invariant(values)
    return ReductionResult(
        family=inst.label,
        params=values,
        source=m,
        change=inst.change(),
        reduced=None if inv is not None else inst.reduced_map(values),
        invariant=inv,
        crash=inst.template.crash,
    )


def reduce(de) -> ReductionResult | NoMatch:
    """First catalog family (data-file order) that the equation matches exactly."""
    m = de.map if isinstance(de, DifferenceEquation) else de
    tried = []
    for tmpl in load_families():
        for idx in tmpl.index_values(m.order):
            inst = tmpl.instantiate(idx)
            tried.append(inst.label)
            values = inst.match(m)
            if values is not None:
                return _result_from_instance(inst, values, m)
    return NoMatch(tuple(tried))


def reduction_for(name: str, values: dict, index: int | None = None) -> ReductionResult:
    """Reduction of a catalog family with known parameters (no matching needed)."""
    from .families import family

    inst = family(name).instantiate(index)
    m = inst.build(values)
    return _result_from_instance(inst, {k: simplify(v) for k, v in values.items()}, m)


# ---------------------------------------------------------------------------
# verification


@dataclass
class SemiconjugacyReport:
    trials: int
    passed: int = 0
    skipped: int = 0
    crashed: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.passed > 0

    @property
    def first_divergence(self):
        return self.failures[0] if self.failures else None


def check_orbit(de, result: ReductionResult, init: Sequence, horizon: int, tol: float = DEFAULT_TOL):
    """Compare ``change(x-orbit)`` with the reduced orbit.

    Returns ``("pass" | "skip" | "fail", step, source_crashed)``.
    """
    de = as_equation(de)
    k = de.order
    out = iterate(de, init, horizon, trace=True, detect_period=False, tol=tol)
    vals = out.trace
    windows = [tuple(vals[t:t + k]) for t in range(len(vals) - k + 1)]
    zs = []
    for w in windows:
        z = result.change(w, tol)
        if z is None:
            return "skip", len(zs), out.crashed
        zs.append(z)
    red = result.reduced_for(windows[0])
    if red is None:
        return "skip", 0, out.crashed
    if result.invariant is not None:
        C0 = invariant_constant(result.invariant, windows[0])
        for t, w in enumerate(windows):
            C = invariant_constant(result.invariant, w)
            if isinstance(C, SingularInit):
                return "skip", t, out.crashed
            if C != C0:
                return "fail", t, out.crashed
    rde = DifferenceEquation(red, COMPLEX)
    rout = iterate(rde, zs[0], len(zs) - 1, trace=True, detect_period=False, tol=tol)
    r = red.order
    rwins = [tuple(rout.trace[t:t + r]) for t in range(len(rout.trace) - r + 1)]
    for t, z in enumerate(zs):
        if t >= len(rwins):
            return "fail", t, out.crashed
        if any(not _same(a, b, tol) for a, b in zip(z, rwins[t])):
            return "fail", t, out.crashed
    return "pass", len(zs) - 1, out.crashed


def _same(a, b, tol) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(complex(a) - complex(b)) <= 1e3 * tol * max(1.0, abs(complex(b)))


def verify_semiconjugacy(
    de, result: ReductionResult, trials: int = 100, horizon: int = 30, seed: int = 0,
    max_num: int = 9, max_den: int = 9,
) -> SemiconjugacyReport:
    """Check the conjugacy identity on random exact orbits.

    Trials whose orbit enters the change's singular locus are skipped and counted.
    """
    de = as_equation(de)
    rng = random.Random(seed)
    rep = SemiconjugacyReport(trials)
    for trial in range(trials):
        init = random_point(rng, de.order, max_num, max_den)
        status, step, crashed = check_orbit(de, result, init, horizon)
        if crashed:
            rep.crashed += 1
        if status == "pass":
            rep.passed += 1
        elif status == "skip":
            rep.skipped += 1
        else:
            rep.failures.append((trial, step, tuple(init)))
    return rep


# ---------------------------------------------------------------------------
# pulling the reduced forbidden set back


def pullback_fs(result: ReductionResult, depth: int, tol: float = DEFAULT_TOL) -> HypersurfaceFamily:
    """Forbidden hypersurfaces of the source equation, from the reduced one.

    With ``z_{n+1} = g(z_{n-s+1})`` every window entry ``z_{-t}`` follows its own
    Möbius orbit.  The source crashes when an entry reaches the crash seed: the
    pole of ``g`` (crash ``s*m - t + s - 1`` steps later) or, for ``zero-next``
    families, the preimage of 0 (``s*m - t`` steps).  The layer of entry ``t`` at
    depth ``m`` is ``{num_t - w * den_t = 0}`` with ``w = g^{-m}(seed)``.
    Points where the change itself is singular are not included.
    """
    g = result.stride_map()
    if g is None:
        raise ValueError("pullback needs a reduced equation of the form z_{n+1} = g(z_{n-s+1})")
    s = result.stride
    if result.crash == "pole":
        if g.d == 0:
            seeds = []
        else:
            seeds = [simplify(-g.c / g.d)]
        offset = s - 1
    elif result.crash == "zero-next":
        seeds = [] if g.b == 0 else [simplify(-g.a / g.b)]
        offset = 0
    else:
        raise ValueError(f"no pullback rule for crash kind {result.crash!r}")
    layers = []
    src = result.change.source_order
    for seed in seeds:
        points, _ = mobius_backward_orbit(g, seed, depth + 1, tol)
        for t in range(s):
            comp = result.change.components[s - 1 - t]
            for m, w in enumerate(points):
                bound = s * m - t + offset
                if bound < 0:
                    continue
                form = comp.num - comp.den * w
                layers.append((bound, form.with_variables(lag_names(src))))
    layers.sort(key=lambda bf: bf[0])
    return HypersurfaceFamily(
        lag_names(src), layers, f"pullback:{result.family}", [b for b, _ in layers]
    )
