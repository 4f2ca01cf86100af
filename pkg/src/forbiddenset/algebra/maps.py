"""Rational maps, difference equations, forward iteration and unfolding.

State vectors are always ordered oldest first: for an equation of order ``k`` the
state at time ``n`` is ``(x_{n-k+1}, ..., x_{n-1}, x_n)``.  Lag variables are named
``x{j}`` for ``x_{n-j}``, so the ring of an order-3 map is ``("x2", "x1", "x0")``
followed by any symbolic parameters.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .poly import Poly, reduce_fraction
from .scalars import COMPLEX, REAL, Scalar, is_exact, is_real_scalar, is_zero, magnitude, simplify, to_float

DEFAULT_TOL = 1e-12
DEFAULT_TERM_BUDGET = 200_000


class CrashReason(enum.Enum):
    POLE_HIT = "pole-hit"
    INDETERMINATE = "indeterminate"
    LEFT_DOMAIN = "left-domain"


class TermBudgetExceeded(RuntimeError):
    """Symbolic iteration produced more terms than allowed."""

    def __init__(self, step: int, terms: int, partial: list):
        super().__init__(f"term budget exceeded at step {step} ({terms} terms)")
        self.step = step
        self.terms = terms
        self.partial = partial


def lag_names(k: int) -> tuple[str, ...]:
    return tuple(f"x{j}" for j in range(k - 1, -1, -1))


class RationalFunction:
    """A fraction ``num/den`` of polynomials sharing one variable list."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduce: bool = True):
        if den is None:
            den = num.one()
        num, den = num._align(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce:
            num, den = reduce_fraction(num, den)
        self.num = num
        self.den = den

    @property
    def variables(self):
        return self.num.variables

    def with_variables(self, variables) -> "RationalFunction":
        return RationalFunction(self.num.with_variables(variables), self.den.with_variables(variables), reduce=False)

    def __add__(self, other):
        other = _as_rf(other, self.variables)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-_as_rf(other, self.variables))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_rf(other, self.variables)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other, self.variables)
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_rf(other, self.variables) / self

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            other = _as_rf(other, self.variables)
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    def evaluate(self, point):
        n, nscale = self.num.evaluate_scaled(point)
        d, dscale = self.den.evaluate_scaled(point)
        return n, d, nscale, dscale

    def num_terms(self) -> int:
        return self.num.num_terms() + self.den.num_terms()

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__


def _as_rf(x, variables) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Poly):
        return RationalFunction(x, reduce=False)
    return RationalFunction(Poly.constant(x, variables), reduce=False)


def compose(num: Poly, den: Poly, subs: dict[str, RationalFunction], target_vars: Sequence[str]) -> RationalFunction:
    """``num/den`` with rational functions substituted for some variables.

    Both polynomials are homogenised with the same per-variable degree so the
    substituted denominators cancel between them.
    """
    num, den = num._align(den)
    target_vars = tuple(target_vars)
    degs = {v: max(num.degree_in(v), den.degree_in(v)) for v in subs}
    cache: dict = {}

    def power(v, which, e):
        key = (v, which, e)
        if key not in cache:
            rf = subs[v]
            base = rf.num if which == 0 else rf.den
            cache[key] = base.with_variables(target_vars) ** e
        return cache[key]

    def build(p: Poly) -> Poly:
        out = Poly(target_vars)
        for exp, c in p.terms.items():
            term = Poly.constant(c, target_vars)
            rest = {}
            for v, e in zip(p.variables, exp):
                if v in subs:
                    term = term * power(v, 0, e) * power(v, 1, degs[v] - e)
                elif e:
                    rest[v] = e
            if rest:
                mono = tuple(rest.get(v, 0) for v in target_vars)
                term = term * Poly(target_vars, {mono: 1})
            out = out + term
        return out

    return RationalFunction(build(num), build(den))


@dataclass(frozen=True)
class RationalMap:
    """Iteration function ``x_{n+1} = numerator / denominator`` of order ``order``.

    ``params`` names symbolic parameters kept as extra ring variables.
    """

    numerator: Poly
    denominator: Poly
    order: int
    params: tuple[str, ...] = ()
    reduced: bool = True

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        variables = lag_names(self.order) + tuple(self.params)
        num = self.numerator.with_variables(variables)
        den = self.denominator.with_variables(variables)
        if den.is_zero():
            raise ValueError("denominator is the zero polynomial")
        if self.reduced:
            num, den = reduce_fraction(num, den)
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def build(cls, num, den, order: int, params: Sequence[str] = ()) -> "RationalMap":
        variables = lag_names(order) + tuple(params)
        if not isinstance(num, Poly):
            num = Poly.constant(num, variables)
        if not isinstance(den, Poly):
            den = Poly.constant(den, variables)
        return cls(num, den, order, tuple(params))

    @classmethod
    def from_function(cls, rf: RationalFunction, order: int, params: Sequence[str] = ()) -> "RationalMap":
        return cls(rf.num, rf.den, order, tuple(params))

    @property
    def variables(self) -> tuple[str, ...]:
        return lag_names(self.order) + self.params

    def lag(self, j: int) -> Poly:
        """The polynomial ``x_{n-j}`` in this map's ring."""
        return Poly.var(f"x{j}", self.variables)

    def as_function(self) -> RationalFunction:
        return RationalFunction(self.numerator, self.denominator, reduce=False)

    def bind(self, values: dict[str, Scalar]) -> "RationalMap":
        """Fix symbolic parameters to scalar values."""
        rest = tuple(p for p in self.params if p not in values)
        num = self.numerator.substitute(values)
        den = self.denominator.substitute(values)
        variables = lag_names(self.order) + rest
        return RationalMap(num.with_variables(variables), den.with_variables(variables), self.order, rest)

    def is_exact(self) -> bool:
        return self.numerator.is_exact() and self.denominator.is_exact()

    def canonical_key(self) -> tuple:
        """Hashable reduced form; equal keys mean algebraically equal maps."""
        return (self.order, self.params, str(self.numerator), str(self.denominator))

    def __eq__(self, other):
        if not isinstance(other, RationalMap):
            return NotImplemented
        if (self.order, self.params) != (other.order, other.params):
            return False
        return (self.numerator * other.denominator - other.numerator * self.denominator).is_zero()

    def __hash__(self):
        return hash(self.canonical_key())

    def __str__(self):
        return f"({self.numerator})/({self.denominator})"


@dataclass(frozen=True)
class DomainPolicy:
    """Admissible set A for iterated values.

    ``natural``: every value where the map is defined; ``epsilon``: values with
    ``|x| >= eps``; ``positive``: strictly positive reals.
    """

    kind: str = "natural"
    eps: float = 0.0

    def __post_init__(self):
        if self.kind not in ("natural", "epsilon", "positive"):
            raise ValueError(f"unknown domain policy {self.kind!r}")
        if self.kind == "epsilon" and not self.eps > 0:
            raise ValueError("epsilon policy needs eps > 0")

    def admits(self, x) -> bool:
        if self.kind == "natural":
            return True
        if self.kind == "epsilon":
            return magnitude(x) >= self.eps
        return is_real_scalar(x) and to_float(x) > 0

    def to_text(self) -> str:
        return {"natural": "natural", "positive": "positive"}.get(self.kind, f"epsilon:{self.eps!r}")

    @classmethod
    def from_text(cls, text: str) -> "DomainPolicy":
        text = text.strip()
        if text in ("natural", "positive"):
            return cls(text)
        if text.startswith("epsilon:") or text.startswith("eps:"):
            return cls("epsilon", float(text.split(":", 1)[1]))
        raise ValueError(f"unknown domain policy {text!r}")


NATURAL = DomainPolicy()


@dataclass(frozen=True)
class DifferenceEquation:
    map: RationalMap
    field: str = REAL
    domain: DomainPolicy = NATURAL

    def __post_init__(self):
        if self.field not in (REAL, COMPLEX):
            raise ValueError("field must be 'R' or 'C'")
        if self.map.params:
            raise ValueError(f"unbound symbolic parameters {self.map.params}; bind them first")

    @property
    def order(self) -> int:
        return self.map.order


def as_equation(x) -> DifferenceEquation:
    if isinstance(x, DifferenceEquation):
        return x
    if isinstance(x, RationalMap):
        return DifferenceEquation(x)
    raise TypeError(f"expected a DifferenceEquation or RationalMap, got {type(x).__name__}")


# ---------------------------------------------------------------------------
# evaluation and iteration


def evaluate(m: RationalMap, point: Sequence, tol: float = DEFAULT_TOL):
    """Value of the map at ``point`` (oldest first) or a :class:`CrashReason`."""
    if isinstance(m, DifferenceEquation):
        m = m.map
    if m.params:
        raise ValueError(f"unbound symbolic parameters {m.params}")
    if len(point) != m.order:
        raise ValueError(f"point has arity {len(point)}, map has order {m.order}")
    point = [simplify(x) for x in point]
    d, dscale = m.denominator.evaluate_scaled(point)
    n, nscale = m.numerator.evaluate_scaled(point)
    if is_zero(d, tol, dscale):
        if is_zero(n, tol, nscale):
            return CrashReason.INDETERMINATE
        return CrashReason.POLE_HIT
    return simplify(n / d) if is_exact(d) and is_exact(n) else n / d


@dataclass
class OrbitOutcome:
    """Result of forward iteration.

    ``step`` is set for crashes: the smallest ``n`` such that ``x_{n+1}`` is
    undefined or leaves the domain (initial state is ``n = 0``).
    """

    crashed: bool
    step: int | None = None
    reason: CrashReason | None = None
    horizon: int | None = None
    trace: list | None = None
    period: int | None = None
    preperiod: int | None = None
    period_tentative: bool = False
    final_state: tuple | None = None

    @property
    def undefined_index(self) -> int | None:
        """Index ``n+1`` of the first undefined term (``x_0`` is index 0)."""
        return None if self.step is None else self.step + 1


def _state_key(state):
    return tuple(state)


def iterate(
    de,
    init: Sequence,
    horizon: int,
    *,
    tol: float = DEFAULT_TOL,
    trace: bool = False,
    detect_period: bool = True,
) -> OrbitOutcome:
    """Apply the recurrence up to ``horizon`` times or until the first crash."""
    de = as_equation(de)
    k = de.order
    if len(init) != k:
        raise ValueError(f"initial state has arity {len(init)}, equation has order {k}")
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    state = [simplify(x) for x in init]
    if not all(de.domain.admits(x) for x in state):
        raise ValueError("initial state lies outside the admissible domain")
    exact = all(is_exact(x) for x in state) and de.map.is_exact()
    values = list(state) if trace else None
    seen: dict = {_state_key(state): 0} if (detect_period and exact) else {}
    recent: list = []
    candidate = None
    for n in range(horizon):
        v = evaluate(de.map, state, tol)
        if isinstance(v, CrashReason):
            return OrbitOutcome(True, n, v, horizon, values, final_state=tuple(state))
        if not de.domain.admits(v):
            return OrbitOutcome(True, n, CrashReason.LEFT_DOMAIN, horizon, values, final_state=tuple(state))
        if de.field == REAL and not is_real_scalar(v):
            return OrbitOutcome(True, n, CrashReason.LEFT_DOMAIN, horizon, values, final_state=tuple(state))
        state = state[1:] + [v]
        if values is not None:
            values.append(v)
        if not detect_period:
            continue
        if exact:
            key = _state_key(state)
            if key in seen:
                first = seen[key]
                return OrbitOutcome(
                    False, horizon=horizon, trace=values, period=n + 1 - first,
                    preperiod=first, final_state=tuple(state),
                )
            seen[key] = n + 1
        elif candidate is None:
            # floats: remember a tentative period, never assert it
            for back, old in enumerate(reversed(recent)):
                if all(magnitude(a - b) <= 1e3 * tol * max(1.0, magnitude(b)) for a, b in zip(state, old)):
                    candidate = back + 1
                    break
            recent.append(tuple(state))
            if len(recent) > 64:
                recent.pop(0)
    out = OrbitOutcome(False, horizon=horizon, trace=values, final_state=tuple(state))
    if candidate is not None:
        out.period = candidate
        out.period_tentative = True
    return out


def crash_step(de, init, horizon: int, tol: float = DEFAULT_TOL) -> int | None:
    """Shortcut: crash step or ``None`` when the orbit survives ``horizon`` steps."""
    out = iterate(de, init, horizon, tol=tol, detect_period=False)
    return out.step if out.crashed else None


# ---------------------------------------------------------------------------
# unfolding


@dataclass(frozen=True)
class Unfolding:
    """Vector self-map ``F(x_{n-k+1}, ..., x_n) = (x_{n-k+2}, ..., x_{n+1})``."""

    map: RationalMap
    tol: float = DEFAULT_TOL

    @property
    def dimension(self) -> int:
        return self.map.order

    def __call__(self, state: Sequence):
        v = evaluate(self.map, state, self.tol)
        if isinstance(v, CrashReason):
            return v
        return tuple(state[1:]) + (v,)

    def components(self) -> tuple[RationalFunction, ...]:
        variables = self.map.variables
        shifts = tuple(RationalFunction(Poly.var(v, variables), reduce=False) for v in lag_names(self.map.order)[1:])
        return shifts + (self.map.as_function(),)


def unfold(de) -> Unfolding:
    if isinstance(de, DifferenceEquation):
        return Unfolding(de.map)
    return Unfolding(de)


def iterate_unfolding_symbolic(
    de, n: int, *, term_budget: int = DEFAULT_TERM_BUDGET
) -> list[tuple[RationalFunction, ...]]:
    """Components of ``F^1 .. F^n`` as reduced fractions in the initial state variables.

    Raises :class:`TermBudgetExceeded` (carrying the finished iterates) when a
    component grows beyond ``term_budget`` terms.
    """
    m = de.map if isinstance(de, DifferenceEquation) else de
    if n < 1:
        raise ValueError("n must be >= 1")
    if not m.is_exact():
        raise ValueError("symbolic unfolding needs exact coefficients")
    variables = m.variables
    lags = lag_names(m.order)
    window = [RationalFunction(Poly.var(v, variables), reduce=False) for v in lags]
    out: list[tuple[RationalFunction, ...]] = []
    for step in range(1, n + 1):
        subs = dict(zip(lags, window))
        nxt = compose(m.numerator, m.denominator, subs, variables)
        terms = nxt.num_terms()
        if terms > term_budget:
            raise TermBudgetExceeded(step, terms, out)
        window = window[1:] + [nxt]
        out.append(tuple(window))
    return out


def transport_point(F: Unfolding, state, steps: int):
    """Apply the unfolding ``steps`` times; returns the state or a CrashReason."""
    for _ in range(steps):
        state = F(state)
        if isinstance(state, CrashReason):
            return state
    return state
