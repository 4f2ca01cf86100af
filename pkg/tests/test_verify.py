from fractions import Fraction

import numpy as np
import pytest

from forbiddenset.algebra import RationalMap, lag_names, parse_poly
from forbiddenset.enumeration import grid_classify
from forbiddenset.fsdesc import FinitePointSet, HypersurfaceFamily, PointSequence, ProductHypersurfaceFamily
from forbiddenset.reductions import shojaei_fs
from forbiddenset.riccati import riccati2_fs
from forbiddenset.verify import (
    EXACT_VERIFIED,
    FLOAT_VERIFIED,
    UNVERIFIED,
    VerificationReport,
    verify_description,
)

H = "f" * 64


def rmap(num, den, k):
    names = lag_names(k)
    return RationalMap(parse_poly(num, names), parse_poly(den, names), k)


RICCATI = rmap("x0", "1 + x0", 1)


def test_exact_points_are_exact_verified():
    fs = PointSequence([Fraction(-1, n) for n in range(1, 8)], "test", Fraction(0), list(range(7)))
    rep = verify_description(RICCATI, fs, H)
    assert rep.status == EXACT_VERIFIED and rep.checked == 7 and rep.failed == 0
    assert rep.tol is None and rep.label == "exact-verified"


def test_float_points_are_float_verified():
    fs = FinitePointSet([-1.0, -0.5, -1 / 3], "test", [0, 1, 2])
    rep = verify_description(RICCATI, fs, H, tol=1e-9)
    assert rep.status == FLOAT_VERIFIED and rep.label == "float-verified(1e-09)"


def test_late_or_missing_crash_is_unverified():
    # -1/3 crashes at step 2, not 1
    late = FinitePointSet([Fraction(-1), Fraction(-1, 3)], "test", [0, 1])
    rep = verify_description(RICCATI, late, H)
    assert rep.status == UNVERIFIED and rep.failed == 1
    never = FinitePointSet([Fraction(2)], "test", None)
    assert verify_description(RICCATI, never, H, horizon=20).status == UNVERIFIED


def test_hypersurface_layers():
    zs = riccati2_fs(1, 1, 1, 5)
    m = rmap("x0*x1 + x1 + 1", "x0*x1", 2)
    layers = [(n, zs.form(n)) for n, _ in zs.layers if n >= 1]
    fam = HypersurfaceFamily(lag_names(2), layers, "test", [n for n, _ in layers])
    rep = verify_description(m, fam, H)
    assert rep.status == EXACT_VERIFIED and rep.checked == 5 * len(layers)
    # shifting every claim one step earlier must fail
    early = HypersurfaceFamily(lag_names(2), layers, "test", [n - 1 for n, _ in layers])
    assert verify_description(m, early, H).status == UNVERIFIED


def test_product_surfaces():
    fs = shojaei_fs(Fraction(1), Fraction(2), Fraction(1), 2, 4)
    rep = verify_description(rmap("x2", "2 + x0*x1*x2", 3), fs, H)
    assert rep.status == EXACT_VERIFIED and rep.depth == 4
    wrong = ProductHypersurfaceFamily(3, [(0, Fraction(-3))], "test")
    assert verify_description(rmap("x2", "2 + x0*x1*x2", 3), wrong, H).status == UNVERIFIED


def test_raster_recheck():
    de = rmap("x1 + x0", "x0*x1", 2)
    r = grid_classify(de, (-2, 2, -2, 2), 40, 6, 1e-6)
    rep = verify_description(de, r, H)
    assert rep.status == FLOAT_VERIFIED and rep.tol == 1e-6 and rep.checked > 0
    # a raster that claims crashes one step late does not recheck
    bad = grid_classify(de, (-2, 2, -2, 2), 40, 6, 1e-6)
    bad.crash_steps = np.where(bad.crash_steps >= 0, bad.crash_steps + 1, -1)
    assert verify_description(de, bad, H).status == UNVERIFIED


def test_unknown_description_type():
    with pytest.raises(TypeError):
        verify_description(RICCATI, object(), H)


def test_report_json_round_trip_and_status_check():
    rep = VerificationReport(H, FLOAT_VERIFIED, 3, 1e-6, 4, 0)
    assert VerificationReport.from_json(rep.to_json()) == rep
    with pytest.raises(ValueError):
        VerificationReport(H, "verified", 1)
