import random
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from forbiddenset.algebra import MobiusTransform, RationalMap, crash_step, iterate, lag_names, parse_poly
from forbiddenset.riccati import (
    Crash,
    FsTopology,
    RiccatiClass,
    RiccatiParams1,
    classify_riccati1,
    normal_form_params,
    riccati1_params,
    riccati_closed_form,
    riccati_fs_order1,
    riccati_fs_topology,
    riccati_fs_zero_set,
    riccati_k_coeffs,
    riccati_k_fs,
    riccati_k_map,
    riccati_normal_form,
    riccati_number,
    root_of_unity_order,
)
from forbiddenset.sampling import sample_off_forms, sample_on_form

fracs = st.fractions(min_value=-9, max_value=9, max_denominator=9)
nonzero = fracs.filter(lambda q: q != 0)


def step_normal_form(R, y0, n):
    """Reference: iterate ``y -> 1 - R/y`` directly."""
    y = y0
    for m in range(n):
        if y == 0:
            return Crash(m)
        y = 1 - R / y
    return y


@pytest.mark.parametrize(
    "p, tag",
    [
        (RiccatiParams1(1, 2, 3, 0), RiccatiClass.LINEAR),
        (RiccatiParams1(2, 4, 1, 2), RiccatiClass.CONSTANT),
        (RiccatiParams1(1, 2, -2, 1), RiccatiClass.PERIOD2),
        (RiccatiParams1(1, 1, 3, 1), RiccatiClass.PROPER),
    ],
)
def test_degenerate_cases(p, tag):
    assert classify_riccati1(p) is tag


def test_period_two_case_is_an_involution():
    p = RiccatiParams1(1, 2, -2, 1)
    out = iterate(p.equation(), [Fraction(5)], 10)
    assert out.period == 2


@given(fracs, fracs, fracs, nonzero, nonzero, fracs)
def test_riccati_number_is_conjugacy_invariant(a, b, c, d, alpha, beta):
    p = RiccatiParams1(a, b, c, d)
    assume(classify_riccati1(p) is RiccatiClass.PROPER)
    # conjugate by x = alpha*u + beta: u' = (T(alpha u + beta) - beta)/alpha
    T = p.mobius()
    A = MobiusTransform(alpha, beta, 0, 1)
    U = A.inverse().compose(T).compose(A)
    q = RiccatiParams1(U.b, U.a, U.d, U.c)
    assert riccati_number(q) == riccati_number(p)


@given(fracs.filter(lambda r: r not in (0,)), fracs, st.integers(0, 12))
def test_closed_form_matches_direct_iteration(R, y0, n):
    got = riccati_closed_form(R, y0, n)
    want = step_normal_form(R, y0, n)
    assert got == want


def test_closed_form_double_root():
    R = Fraction(1, 4)
    for y0 in (Fraction(1, 2), Fraction(3), Fraction(-2, 5)):
        for n in range(8):
            assert riccati_closed_form(R, y0, n) == step_normal_form(R, y0, n)


def test_closed_form_float_input():
    got = riccati_closed_form(Fraction(1, 8), 0.7, 10)
    want = step_normal_form(0.125, 0.7, 10)
    assert abs(got - want) < 1e-12


@given(fracs.filter(lambda r: r != 0))
def test_zero_set_matches_backward_orbit(R):
    fs = riccati_fs_order1(normal_form_params(R), 12, verify=False)
    assert riccati_fs_zero_set(R, 12) == list(fs.points)[: len(riccati_fs_zero_set(R, 12))]


def test_forbidden_points_crash_exactly_on_their_step():
    p = RiccatiParams1(1, 1, 3, 1)
    fs = riccati_fs_order1(p, 15)
    for i, x in enumerate(fs.points):
        assert crash_step(p.equation(), [x], 20) == i
    assert fs.crash_steps == list(range(15))


def test_normal_form_conjugacy():
    p = RiccatiParams1(1, 1, 3, 1)
    nf = riccati_normal_form(p)
    assert nf.R == Fraction(1, 8)
    T = p.mobius()
    for x in (Fraction(2), Fraction(-5, 3), Fraction(7, 2)):
        y = nf.psi(x)
        assert nf.psi(T(x)) == 1 - nf.R / y


@pytest.mark.parametrize("R, period", [(Fraction(1), 3), (Fraction(1, 2), 4), (Fraction(1, 3), 6)])
def test_finite_topology_and_global_period(R, period):
    topo = riccati_fs_topology(R)
    assert topo.tag == FsTopology.FINITE and topo.period == period
    assert root_of_unity_order(R) == period
    de = normal_form_params(R).equation()
    for y0 in (Fraction(3), Fraction(-7, 2), Fraction(5, 11)):
        out = iterate(de, [y0], 3 * period)
        assert out.crashed or out.period == period
    fs = riccati_fs_order1(normal_form_params(R), 50)
    assert fs.kind == "finite" and len(fs.points) == period - 1


def test_dense_candidate_has_long_distinct_orbit():
    topo = riccati_fs_topology(Fraction(2))
    assert topo.tag == FsTopology.DENSE
    fs = riccati_fs_order1(normal_form_params(Fraction(2)), 60, verify=False)
    assert len(set(fs.points)) == 60


def test_convergent_limit_is_the_small_root():
    topo = riccati_fs_topology(Fraction(2, 9))  # roots 1/3 and 2/3
    assert topo.tag == FsTopology.CONVERGENT and topo.limit == Fraction(1, 3)
    fs = riccati_fs_order1(normal_form_params(Fraction(2, 9)), 80, verify=False)
    assert abs(float(fs.points[-1]) - 1 / 3) < 1e-12


def test_riccati1_params_from_map():
    names = lag_names(1)
    m = RationalMap(parse_poly("1 + x0", names), parse_poly("3 + x0", names), 1)
    assert riccati1_params(m) == RiccatiParams1(1, 1, 3, 1)
    assert riccati1_params(RationalMap(parse_poly("x0^2", names), parse_poly("1", names), 1)) is None


@pytest.mark.parametrize("coeffs", [(1, 1, 1), (2, 0, -3, 5), (0, 1, 0, 0, 2)])
def test_riccati_k_coeffs_round_trip(coeffs):
    m = riccati_k_map(coeffs)
    assert riccati_k_coeffs(m) == tuple(Fraction(c) for c in coeffs)


@pytest.mark.parametrize("coeffs", [(1, 1, 1, 1), (2, -1, 3)])
def test_order_k_layers_crash_on_time(coeffs):
    rng = random.Random(11)
    zs = riccati_k_fs(coeffs, 6)
    assert zs.verify_recurrence()
    de = riccati_k_map(coeffs)
    for n, _ in zs.layers:
        if n < 1:
            continue
        form = zs.form(n)
        for _ in range(5):
            pt = sample_on_form(form, rng)
            s = crash_step(de, pt, n + 3)
            assert s is not None and s <= zs.crash_bound(n)
    far = riccati_k_fs(coeffs, 25)
    forms = [far.form(n) for n, _ in far.layers]
    for _ in range(5):
        assert crash_step(de, sample_off_forms(forms, rng, zs.order), 20) is None


def test_corrupted_coefficient_breaks_layers():
    # negative control: layers of (1, 1, 1) are not layers of (1, 1, 2)
    rng = random.Random(3)
    zs = riccati_k_fs((1, 1, 1), 6)
    wrong = riccati_k_map((1, 1, 2))
    late = 0
    for n in range(2, 7):
        pt = sample_on_form(zs.form(n), rng)
        s = crash_step(wrong, pt, n + 2)
        late += s is None or s > n
    assert late > 0


def test_order_k_rejects_vanishing_last_coefficient():
    with pytest.raises(ValueError):
        riccati_k_fs((1, 1, 0), 3)
