import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from forbiddenset.algebra import crash_step, lag_names, parse_poly, RationalMap
from forbiddenset.enumeration._kernels import batch_orbits, batch_orbits_numba, batch_orbits_numpy, have_numba
from forbiddenset.enumeration.grid import poly_arrays

needs_numba = pytest.mark.skipif(batch_orbits_numba is None, reason="numba not installed")

MAPS = [
    ("x1 + x0", "x1*x0"),
    ("-x1 + x0", "x1*x0"),
    ("x0^2 + x1", "x0 - x1 + 1/2"),
    ("1 + x0*x1 + x1", "x0*x1"),
]


def arrays(num, den):
    names = lag_names(2)
    m = RationalMap(parse_poly(num, names), parse_poly(den, names), 2)
    return m, poly_arrays(m.numerator, 2), poly_arrays(m.denominator, 2)


@needs_numba
@given(st.sampled_from(MAPS), st.integers(0, 2**32 - 1), st.sampled_from([1e-12, 1e-6, 1e-3]))
def test_backends_agree(pair, seed, tol):
    _m, (ne, nc), (de, dc) = arrays(*pair)
    rng = np.random.default_rng(seed)
    states = rng.uniform(-3, 3, size=(200, 2))
    states[:10, 1] = 0.0  # pole hits on the first step
    states[10:20, 0] = states[10:20, 1]
    a = batch_orbits_numpy(states, ne, nc, de, dc, 12, tol)
    b = batch_orbits(states, ne, nc, de, dc, 12, tol, backend="numba")
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(a[1], b[1], equal_nan=True)


def test_numpy_kernel_matches_scalar_iteration():
    m, (ne, nc), (de, dc) = arrays("x1 + x0", "x1*x0")
    rng = np.random.default_rng(1)
    states = rng.uniform(-2, 2, size=(60, 2))
    states[0] = (1.0, -1.0)
    steps, _ = batch_orbits_numpy(states, ne, nc, de, dc, 8, 1e-9)
    for s, st_ in zip(states, steps):
        ref = crash_step(m, [float(s[0]), float(s[1])], 8, tol=1e-9)
        assert st_ == (-1 if ref is None else ref)


def test_environment_switch_disables_numba():
    code = "from forbiddenset.enumeration._kernels import have_numba; print(have_numba())"
    env = dict(os.environ, FORBIDDENSET_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
    env["FORBIDDENSET_NO_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == str(batch_orbits_numba is not None)


def test_default_backend_follows_availability(monkeypatch):
    monkeypatch.setenv("FORBIDDENSET_NO_NUMBA", "1")
    assert not have_numba()
    _m, (ne, nc), (de, dc) = arrays("x1 + x0", "x1*x0")
    steps, _ = batch_orbits(np.array([[1.0, 0.0]]), ne, nc, de, dc, 3, 1e-12)
    assert steps[0] == 0
