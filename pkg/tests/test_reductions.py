import random
from fractions import Fraction

import pytest

from forbiddenset.algebra import MobiusTransform, RationalMap, crash_step, iterate, lag_names, parse_poly
from forbiddenset.fsdesc import ProductHypersurfaceFamily
from forbiddenset.reductions import (
    DegenerateFs,
    NoMatch,
    aghajani_form,
    aghajani_fs,
    check_orbit,
    invariant_constant,
    invariant_reduce,
    mobius_product_family,
    mobius_transport,
    palladino_form,
    pullback_fs,
    reduce,
    shojaei_fs,
    transport_form,
    verify_semiconjugacy,
)
from forbiddenset.reductions.invariants import SingularInit
from forbiddenset.sampling import random_point, sample_on_form


def rmap(num, den, k):
    names = lag_names(k)
    return RationalMap(parse_poly(num, names), parse_poly(den, names), k)


@pytest.mark.parametrize(
    "num, den, k, family, reduced",
    [
        ("x0*x1", "x0 + x2", 3, "abo-zeid[k=2]", ("x0 + 1", "1")),
        ("x1", "1 + x0*x1", 2, "bajo-liz", ("x0", "x0 + 1")),
        ("x2", "1 + x0*x1*x2", 3, "khalaf-allah", ("x0", "x0 + 1")),
        ("x2", "-1 + x0*x1*x2", 3, "khalaf-allah", ("x0", "x0 - 1")),
    ],
)
def test_reduced_equations(num, den, k, family, reduced):
    r = reduce(rmap(num, den, k))
    assert r.family == family
    assert r.reduced == rmap(*reduced, r.reduced.order)


def test_unrelated_equation_has_no_match():
    r = reduce(rmap("x0 + 1", "x1", 2))
    assert isinstance(r, NoMatch) and r.tried


def test_palladino_constant_and_reduced_map():
    form = palladino_form(1)
    assert invariant_constant(form, [Fraction(1), Fraction(1)]) == 4
    assert invariant_reduce(form, 4) == rmap("1 + x0", "3 - x0", 1)


def test_aghajani_reduced_map_reproduces_orbit():
    form = aghajani_form()
    init = [Fraction(0), Fraction(1), Fraction(3)]
    C = invariant_constant(form, init)
    assert C == Fraction(3, 2)
    red = invariant_reduce(form, C)
    assert red == rmap("3*x0 - 2*x1", "1", 2)
    src = rmap("x0^2 + x1^2 - x0*(x1 + x2)", "x1 - x2", 3)
    a = iterate(src, init, 12, trace=True, detect_period=False).trace
    b = iterate(red, init[1:], 12, trace=True, detect_period=False).trace
    assert a[1:] == b


def test_invariant_singular_window():
    assert isinstance(invariant_constant(aghajani_form(), [Fraction(1), Fraction(2), Fraction(2)]), SingularInit)
    with pytest.raises(ValueError):
        invariant_reduce(aghajani_form(), 1)


def test_corrupted_coefficient_diverges_at_first_step():
    # negative control: the Bajo-Liz change applied to a perturbed equation
    r = reduce(rmap("x1", "1 + x0*x1", 2))
    wrong = rmap("x1", "1 + 2*x0*x1", 2)
    status, step, _ = check_orbit(wrong, r, [Fraction(2), Fraction(3)], 10)
    assert status == "fail" and step == 1
    rep = verify_semiconjugacy(wrong, r, trials=10, horizon=10)
    assert not rep.ok and rep.first_divergence[1] == 1


@pytest.mark.parametrize(
    "num, den, k",
    [
        ("x0*x1", "x0 + x2", 3),
        ("x1", "1 + x0*x1", 2),
        ("x2", "1 + x0*x1*x2", 3),
        ("x0*(x1 + 2*x0)", "3*x1 + x0", 2),
        ("x3", "1 + 2*x1*x3", 4),
        ("x1*(x3 + 2*x1)", "3*x3 + x1", 4),
    ],
)
def test_pullback_layers_crash_on_time(num, den, k):
    rng = random.Random(5)
    m = rmap(num, den, k)
    fs = pullback_fs(reduce(m), 5)
    checked = 0
    for (_d, form), bound in zip(fs.layers, fs.crash_bounds):
        for _ in range(3):
            pt = sample_on_form(form, rng)
            if pt is None:
                continue
            checked += 1
            s = crash_step(m, pt, bound + 2)
            assert s is not None and s <= bound
    assert checked >= len(fs.layers)


def test_shojaei_product_surfaces():
    alpha, beta, gamma = Fraction(1), Fraction(2), Fraction(1)
    fs = shojaei_fs(alpha, beta, gamma, 2, 5)
    assert isinstance(fs, ProductHypersurfaceFamily) and not fs.finite
    # r_n = -beta / (gamma (1 + c + ... + c^n)) with c = alpha / beta
    c = alpha / beta
    assert [r for _, r in fs.constants] == [-beta / (gamma * sum(c**i for i in range(n + 1))) for n in range(6)]
    m = rmap("x2", "2 + x0*x1*x2", 3)
    rng = random.Random(8)
    for n, r in fs.constants:
        x, y = random_point(rng, 2)
        s = crash_step(m, [x, y, r / (x * y)], n + 3)
        assert s is not None and s <= n


def test_shojaei_finite_and_degenerate():
    fin = shojaei_fs(-1, 1, 1, 1, 6)  # c = -1: finite
    assert fin.finite and [r for _, r in fin.constants] == [-1]
    assert isinstance(shojaei_fs(1, 1, 0, 1, 4), DegenerateFs)


def test_aghajani_planes_are_complete():
    fs = aghajani_fs()
    assert fs.complete and fs.crash_bounds == [0, 1]


def test_mobius_transport_round_trip():
    m = rmap("x0^2 + 1", "x0", 1)
    T = MobiusTransform(1, 2, 1, 3)
    there = mobius_transport(m, T)
    back = mobius_transport(there, T.inverse())
    assert back.map == m


def test_transport_form_moves_zero_sets():
    # the pole x = 0 of 1/x transported by T(u) = u + 1 becomes u = -1
    names = lag_names(1)
    form = parse_poly("x0", names)
    moved = transport_form(form, MobiusTransform(1, 1, 0, 1))
    assert moved.evaluate([Fraction(-1)]) == 0


def test_mobius_product_invariant_is_constant():
    r = mobius_product_family(MobiusTransform(1, 1, 1, 2), MobiusTransform(2, 1, 1, 1), 2)
    rng = random.Random(2)
    for _ in range(10):
        init = random_point(rng, r.source.order)
        tr = iterate(r.source, init, 8, trace=True, detect_period=False).trace
        Cs = [invariant_constant(r.invariant, tr[t:t + 3]) for t in range(len(tr) - 2)]
        Cs = [C for C in Cs if not isinstance(C, SingularInit)]
        assert len(set(Cs)) <= 1
