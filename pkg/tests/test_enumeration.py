import math
from fractions import Fraction

import numpy as np
import pytest

from forbiddenset.algebra import DifferenceEquation, RationalMap, crash_step, lag_names, parse_poly
from forbiddenset.enumeration import (
    cdv_curves,
    cell_centers,
    cobweb_fs,
    evaluate_word,
    forbidden_curves,
    grid_classify,
    inverse_orbit,
    pole_hit_step,
    power_pole_map,
    sinh_pole_map,
    symbolic_words,
)
from forbiddenset.enumeration import cobweb
from forbiddenset.enumeration.render import read_ppm, write_ppm, write_points_svg, write_steps_csv
from forbiddenset.enumeration.words import corollary_rule
from forbiddenset.riccati import riccati2_fs, riccati_k_map


def rmap(num, den, k):
    names = lag_names(k)
    return RationalMap(parse_poly(num, names), parse_poly(den, names), k)


def reciprocal_sum(A, B):
    return rmap(f"({A})*x1 + ({B})*x0", "x1*x0", 2)


# cobweb ---------------------------------------------------------------------


def forward_hits_pole(f, x, steps):
    for _ in range(steps):
        if abs(x) < 1e-7:
            return True
        x = float(f(x))
    return abs(x) < 1e-7


def test_decreasing_sinh_map_converges_to_fixed_point():
    fmap = sinh_pole_map(1.0)
    res = cobweb_fs(fmap, 250)
    assert fmap.direction == cobweb.DECREASING
    assert res.classification == cobweb.FIXED_POINT
    assert res.limit == pytest.approx(-0.5926, abs=1e-4)
    assert abs(float(fmap(res.limit)) - res.limit) < 1e-10
    assert res.residual < 1e-8 and res.in_interval()


def test_decreasing_reciprocal_map_converges_to_golden_root():
    fmap = power_pole_map(1, a=1.0, b=1.0)  # 1 + 1/x
    res = cobweb_fs(fmap, 250)
    assert res.classification == cobweb.FIXED_POINT
    assert res.limit == pytest.approx((1 - math.sqrt(5)) / 2, abs=1e-12)
    assert res.in_interval()


def test_increasing_map_below_both_fixed_points():
    fmap = power_pole_map(1, a=-1.0, b=3.0)  # 3 - 1/x
    res = cobweb_fs(fmap, 250)
    assert fmap.direction == cobweb.INCREASING
    assert res.classification == cobweb.MONOTONE_UP
    assert res.limit == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-12)
    assert all(a <= b for a, b in zip(res.points, res.points[1:]))


def test_cobweb_points_reach_the_pole():
    fmap = power_pole_map(3)
    res = cobweb_fs(fmap, 12)
    for n, x in enumerate(res.points):
        assert forward_hits_pole(fmap, x, n + 1)


def test_non_monotone_map_is_refused():
    bad = cobweb.MonotonePoleMap(lambda x: 1 / x + x**2, "bumpy")
    assert not bad.verified
    with pytest.raises(ValueError):
        cobweb_fs(bad, 10)


# symbolic curves ---------------------------------------------------------------


def test_unfolding_curves_agree_with_riccati_layers():
    fs = forbidden_curves(riccati_k_map((1, 1, 1)), 5)
    zs = riccati2_fs(1, 1, 1, 5)
    for d in range(2, 6):
        assert set(fs.forms(d)) == {zs.form(d - 1)}


def test_curves_truncate_on_term_budget():
    fs = forbidden_curves(rmap("x0^2 + x1", "x0 - x1^2 + 1", 2), 8, term_budget=40)
    assert fs.truncated and fs.layers


# inverse orbits -------------------------------------------------------------------


def test_inverse_orbit_of_riccati_is_minus_one_over_n():
    tree = inverse_orbit(rmap("x0", "1 + x0", 1), 6, field="R")
    pts = sorted(x for (x,) in tree.points())
    assert pts == sorted(Fraction(-1, n) for n in range(1, 8))
    assert all(crash_step(rmap("x0", "1 + x0", 1), list(n.point), 10) == n.depth for n in tree.nodes)


def test_inverse_orbit_complex_nodes_verify():
    m = DifferenceEquation(rmap("1", "x0^2 - 1", 1), field="C")
    tree = inverse_orbit(m, 4, field="C")
    assert tree.stats["verify_failed"] == 0
    assert len(tree.points(4)) > 10


def test_cdv_curve_recursion():
    for p in (-1.0, -2.5):
        c = cdv_curves(p, 4)
        for n in (1, 2, 3):
            for x in (0.5, 2.0, 7.0):
                assert c.g_inv(n, c.g(n, x)) == pytest.approx(x, rel=1e-9)
                # g_{n+1}(x) = x (-p + g_n^{-1}(x))
                assert c.g(n + 1, x) == pytest.approx(c.h(lambda t: c.g_inv(n, t), x), rel=1e-9)


def test_cdv_rejects_p_above_minus_one():
    with pytest.raises(ValueError):
        cdv_curves(-0.5, 3)


# words ----------------------------------------------------------------------------


def test_word_values_follow_branches():
    x, real = evaluate_word((1,))
    assert real and x == pytest.approx(math.sqrt(2))
    assert pole_hit_step(x, 3) == 1


def test_two_minus_branches_can_stay_real():
    # the letter rule "no two consecutive h-" is not necessary for realness
    x, real = evaluate_word((-1, -1))
    assert real and not corollary_rule((-1, -1))
    assert x == pytest.approx(-0.5412, abs=1e-4)


def test_exact_depth_words():
    assert len(symbolic_words(4, exact_depth=True)) == 16


# grid and rendering ----------------------------------------------------------------------


def test_cell_centers_are_symmetric():
    c = cell_centers(-2.0, 2.0, 8)
    assert np.allclose(c, -c[::-1])
    assert c[0] == pytest.approx(-1.75)


def test_grid_marks_axes_and_diagonal():
    r = grid_classify(reciprocal_sum(1, -1), (-2, 2, -2, 2), 9, 3)
    steps = r.crash_steps
    mid = 4
    assert (steps[:, mid] == 0).all() and (steps[mid, :] == 0).all()
    # x_{-1} = x_0 crashes at step 1 off the axes (rows run top to bottom)
    assert all(steps[8 - i, i] == 1 for i in range(9) if i != mid)


def test_true_raster_symmetry_flips_the_older_coordinate():
    for A, B in [(1, 1), (1, -1), (2, 1)]:
        a = grid_classify(reciprocal_sum(A, B), (-3, 3, -3, 3), 120, 8, 1e-3).crash_steps
        b = grid_classify(reciprocal_sum(-A, B), (-3, 3, -3, 3), 120, 8, 1e-3).crash_steps
        assert np.array_equal(a, b[:, ::-1])


def test_grid_cells_match_scalar_iteration():
    de = reciprocal_sum(1, 1)
    r = grid_classify(de, (-2, 2, -2, 2), 16, 6, 1e-6)
    xs = cell_centers(-2, 2, 16)
    ys = cell_centers(-2, 2, 16)[::-1]
    for i in range(0, 16, 3):
        for j in range(0, 16, 3):
            s = crash_step(de, [float(xs[j]), float(ys[i])], 6, tol=1e-6)
            assert r.crash_steps[i, j] == (-1 if s is None else s)


def test_ppm_round_trip_and_csv(tmp_path):
    r = grid_classify(reciprocal_sum(1, 1), (-2, 2, -2, 2), 20, 5)
    ppm, sidecar = write_ppm(r, tmp_path / "g.ppm", {"note": "x"})
    img = read_ppm(ppm)
    assert img.shape == (20, 20, 3)
    assert sidecar.exists()
    csv = write_steps_csv(r, tmp_path / "g.csv")
    back = np.loadtxt(csv, delimiter=",", dtype=int)
    assert np.array_equal(back, r.crash_steps)


def test_points_svg(tmp_path):
    out = write_points_svg([1 + 1j, -1, 0.5j], tmp_path / "p.svg")
    text = out.read_text()
    assert text.startswith("<svg") or "<svg" in text
    assert text.count("<circle") == 3
