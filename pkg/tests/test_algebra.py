from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from forbiddenset.algebra import (
    CrashReason,
    DifferenceEquation,
    DomainPolicy,
    INF,
    EquationParseError,
    MobiusTransform,
    Poly,
    QuadNumber,
    RationalMap,
    crash_step,
    evaluate,
    factor_rational,
    format_scalar,
    iterate,
    iterate_unfolding_symbolic,
    lag_names,
    parse_definition,
    parse_definitions,
    parse_poly,
    parse_scalar,
    reduce_fraction,
    root_of_unity,
    transport_point,
    unfold,
)
from forbiddenset.algebra.poly import _sympy_ring, to_sympy
from forbiddenset.algebra.scalars import is_zero, scalar_from_json, scalar_to_json, to_complex

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
nonzero = fracs.filter(lambda q: q != 0)
radicands = st.sampled_from([-1, -3, 2, 5])
quads = st.builds(QuadNumber, fracs, fracs, radicands)


@st.composite
def quad_pairs(draw):
    d = draw(radicands)
    return QuadNumber(draw(fracs), draw(fracs), d), QuadNumber(draw(fracs), draw(fracs), d)


def rmap(num, den, k):
    names = lag_names(k)
    return RationalMap(parse_poly(num, names), parse_poly(den, names), k)


# scalars --------------------------------------------------------------------


@given(quad_pairs())
def test_quadnumber_ring_ops_match_complex(pair):
    x, y = pair
    cx, cy = to_complex(x), to_complex(y)
    assert abs(to_complex(x + y) - (cx + cy)) < 1e-9
    assert abs(to_complex(x * y) - (cx * cy)) < 1e-6
    assert abs(to_complex(x - y) - (cx - cy)) < 1e-9


@given(quads)
def test_quadnumber_inverse(x):
    assume(x != 0)
    assert x * (1 / x) == 1


@pytest.mark.parametrize("m", [1, 2, 3, 4, 6])
def test_root_of_unity_is_primitive(m):
    c = root_of_unity(m)
    assert c**m == 1
    assert all(c**j != 1 for j in range(1, m))


@given(st.one_of(fracs, quads))
def test_scalar_text_and_json_round_trip(x):
    assert parse_scalar(format_scalar(x)) == x
    assert scalar_from_json(scalar_to_json(x)) == x


def test_scaled_zero_test():
    assert is_zero(1e-13, 1e-12)
    assert not is_zero(1e-9, 1e-12)
    assert is_zero(1e-6, 1e-12, scale=1e7)


# polynomials ----------------------------------------------------------------

names3 = ("x2", "x1", "x0")
small = st.integers(-3, 3)
polys = st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)), small, max_size=5).map(
    lambda t: Poly(names3, t)
)
points3 = st.lists(fracs, min_size=3, max_size=3)


@given(polys, polys, points3)
def test_poly_arithmetic_is_evaluation_homomorphism(p, q, pt):
    assert (p + q).evaluate(pt) == p.evaluate(pt) + q.evaluate(pt)
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)
    assert (p - q).evaluate(pt) == p.evaluate(pt) - q.evaluate(pt)


@given(polys, polys, points3)
def test_reduce_fraction_keeps_value(p, q, pt):
    assume(not q.is_zero())
    num, den = reduce_fraction(p * q, q * q)
    assume(q.evaluate(pt) != 0)
    assert num.evaluate(pt) / den.evaluate(pt) == p.evaluate(pt) / q.evaluate(pt)


def test_reduce_fraction_cancels_common_factor():
    v = ("x0",)
    num, den = reduce_fraction(parse_poly("x0^2 - 1", v), parse_poly("x0 - 1", v))
    assert (num, den) == (parse_poly("x0 + 1", v), parse_poly("1", v))


@given(polys, polys)
def test_factors_multiply_back(p, q):
    f = p * q
    assume(not f.is_constant())
    facs = factor_rational(f)
    prod = f.one()
    for g, m in facs:
        prod = prod * g**m
    assert prod.primitive()[1] == f.primitive()[1]
    R = _sympy_ring(f.used_variables())[0]
    ref = to_sympy(f.with_variables(f.used_variables()), R).factor_list()[1]
    assert sorted(m for _, m in facs) == sorted(m for g, m in ref if not g.is_ground)


def test_parse_poly_rejects_unknown_names():
    with pytest.raises(EquationParseError):
        parse_poly("x0 + z", ("x0",))


# Möbius ----------------------------------------------------------------------

mobius = st.tuples(fracs, fracs, fracs, fracs).filter(lambda t: t[0] * t[3] - t[1] * t[2] != 0).map(
    lambda t: MobiusTransform(*t)
)


@given(mobius, mobius, fracs)
def test_mobius_compose_is_function_composition(T, U, x):
    u = U(x)
    assume(u is not INF)
    assert T.compose(U)(x) == T(u)


@given(mobius)
def test_mobius_inverse(T):
    assert T.compose(T.inverse()).is_identity()
    assert T.inverse().compose(T).is_identity()


def test_singular_mobius_rejected():
    with pytest.raises(ValueError):
        MobiusTransform(1, 2, 2, 4)


# maps and iteration -----------------------------------------------------------


def test_zero_denominator_rejected():
    with pytest.raises(ValueError):
        rmap("x0", "0", 1)
    with pytest.raises(EquationParseError):
        parse_definition("order: 1\nnumerator: x0\ndenominator: x0 - x0\n")


def test_crash_step_convention():
    recip = rmap("1", "x0", 1)
    out = iterate(recip, [Fraction(0)], 5)
    assert out.crashed and out.step == 0 and out.undefined_index == 1
    assert out.reason is CrashReason.POLE_HIT
    riccati = rmap("x0", "1 + x0", 1)
    assert crash_step(riccati, [Fraction(-1, 3)], 10) == 2


def test_indeterminate_point_is_flagged():
    m = rmap("x0", "x0", 1)  # reduced to 1 by the gcd step
    assert evaluate(m, [Fraction(0)]) == 1
    m2 = RationalMap(parse_poly("x0", ("x0",)), parse_poly("x0", ("x0",)), 1, reduced=False)
    assert evaluate(m2, [Fraction(0)]) is CrashReason.INDETERMINATE


def test_exact_period_detection():
    out = iterate(rmap("1", "x0", 1), [Fraction(3)], 20)
    assert not out.crashed and out.period == 2 and out.preperiod == 0


def test_float_period_is_tentative():
    out = iterate(rmap("1", "x0", 1), [3.0], 20)
    assert out.period == 2 and out.period_tentative


def test_positive_domain_policy():
    de = DifferenceEquation(rmap("x0 - 1", "1", 1), domain=DomainPolicy("positive"))
    out = iterate(de, [Fraction(5, 2)], 10)
    assert out.crashed and out.reason is CrashReason.LEFT_DOMAIN and out.step == 2


def test_real_field_flags_complex_values():
    names = lag_names(1)
    m = RationalMap(Poly.var("x0", names) * QuadNumber(0, 1, -1), Poly.constant(1, names), 1)
    out = iterate(DifferenceEquation(m, field="R"), [Fraction(1)], 3)
    assert out.crashed and out.step == 0 and out.reason is CrashReason.LEFT_DOMAIN
    assert not iterate(DifferenceEquation(m, field="C"), [Fraction(1)], 3).crashed


@given(st.lists(nonzero, min_size=2, max_size=2))
def test_symbolic_unfolding_matches_numeric_iteration(pt):
    m = rmap("x1 + x0", "x1*x0 + 1", 2)
    iterates = iterate_unfolding_symbolic(m, 3)
    state = tuple(pt)
    F = unfold(m)
    for comps in iterates:
        state = F(state)
        if isinstance(state, CrashReason):
            return
        for rf, v in zip(comps, state):
            n, d = rf.evaluate(pt)[:2]
            assert n / d == v


def test_transport_point_stops_at_crash():
    F = unfold(rmap("x1", "x0", 2))
    assert transport_point(F, (Fraction(1), Fraction(2)), 2) == (Fraction(1, 2), Fraction(4))
    assert transport_point(F, (Fraction(1), Fraction(0)), 2) is CrashReason.POLE_HIT


# text format -------------------------------------------------------------------

TEXT = """\
name: demo
family: test
order: 2
params: a = 1/2, b
numerator: a*x0 + b
denominator: 1 + x1
notes: a demo block
---
order: 1
vars: y
numerator: 1
denominator: y
"""


def test_parse_definitions_blocks_and_params():
    first, second = parse_definitions(TEXT)
    assert first.params == {"a": Fraction(1, 2), "b": None}
    assert first.symbolic_params() == ("b",)
    assert first.rational_map().params == ("b",)
    assert second.equation().map == rmap("1", "x0", 1)


def test_definition_text_round_trip():
    d = parse_definitions(TEXT)[0]
    back = parse_definition(d.to_text())
    assert back.rational_map() == d.rational_map()
    assert back.params == d.params


@pytest.mark.parametrize(
    "text, line",
    [
        ("order: 2\nnumerator: x0 +* x1\n", 2),
        ("order: two\nnumerator: x0\n", 1),
        ("order: 1\nbogus: 3\nnumerator: x0\n", 2),
        ("order: 1\nnumerator: x0\ndenominator: 0\n", 3),
        ("order: 2\nvars: u\nnumerator: u\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(EquationParseError) as exc:
        parse_definition(text)
    assert exc.value.line == line
