"""Float orbit kernels for raster classification.

A polynomial is passed as an exponent matrix ``(terms, k)`` and a coefficient
vector.  ``batch_orbits`` runs every initial state for ``horizon`` steps and
returns the crash step (``-1`` when the orbit survives) and the last value.

The numba versions are used unless numba is missing or the environment
variable ``FORBIDDENSET_NO_NUMBA`` is set to a non-empty value other than ``0``.
Both paths give identical results (same operation order, no fastmath).
"""
from __future__ import annotations

import os

import numpy as np


def _numba_disabled() -> bool:
    v = os.environ.get("FORBIDDENSET_NO_NUMBA", "")
    return v not in ("", "0")


def batch_orbits_numpy(states, num_exp, num_coef, den_exp, den_coef, horizon, tol):
    states = np.array(states, dtype=np.float64, copy=True)
    m, k = states.shape
    steps = np.full(m, -1, dtype=np.int64)
    last = np.full(m, np.nan)
    alive = np.ones(m, dtype=bool)
    for n in range(horizon):
        idx = np.nonzero(alive)[0]
        if idx.size == 0:
            break
        s = states[idx]
        nv = np.zeros(idx.size)
        ns = np.zeros(idx.size)
        for t in range(num_exp.shape[0]):
            mono = np.ones(idx.size)
            for j in range(k):
                for _ in range(num_exp[t, j]):
                    mono = mono * s[:, j]
            term = num_coef[t] * mono
            nv = nv + term
            ns = ns + np.abs(term)
        dv = np.zeros(idx.size)
        ds = np.zeros(idx.size)
        for t in range(den_exp.shape[0]):
            mono = np.ones(idx.size)
            for j in range(k):
                for _ in range(den_exp[t, j]):
                    mono = mono * s[:, j]
            term = den_coef[t] * mono
            dv = dv + term
            ds = ds + np.abs(term)
        bad = (np.abs(dv) <= tol * np.maximum(1.0, ds)) | ~np.isfinite(dv)
        steps[idx[bad]] = n
        alive[idx[bad]] = False
        ok = idx[~bad]
        v = nv[~bad] / dv[~bad]
        states[ok, :-1] = states[ok, 1:]
        states[ok, -1] = v
        last[ok] = v
    return steps, last


batch_orbits_numba = None
try:  # pragma: no cover - exercised when numba is installed
    import numba

    if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
        # the bundled TBB is often too old; avoid probing it first
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

    @numba.njit(cache=True)
    def _eval(state, exp, coef):
        val = 0.0
        scale = 0.0
        for t in range(exp.shape[0]):
            mono = 1.0
            for j in range(state.shape[0]):
                for _ in range(exp[t, j]):
                    mono = mono * state[j]
            term = coef[t] * mono
            val = val + term
            scale = scale + abs(term)
        return val, scale

    @numba.njit(cache=True, parallel=True)
    def batch_orbits_numba(states, num_exp, num_coef, den_exp, den_coef, horizon, tol):
        # cells are independent, so the parallel loop cannot change any result
        m, k = states.shape
        steps = np.full(m, -1, dtype=np.int64)
        last = np.full(m, np.nan)
        for i in numba.prange(m):
            state = np.empty(k)
            for j in range(k):
                state[j] = states[i, j]
            for n in range(horizon):
                dv, ds = _eval(state, den_exp, den_coef)
                if abs(dv) <= tol * max(1.0, ds) or not np.isfinite(dv):
                    steps[i] = n
                    break
                nv, _ = _eval(state, num_exp, num_coef)
                v = nv / dv
                for j in range(k - 1):
                    state[j] = state[j + 1]
                state[k - 1] = v
                last[i] = v
        return steps, last

except ImportError:  # pragma: no cover
    pass


def have_numba() -> bool:
    return batch_orbits_numba is not None and not _numba_disabled()


def batch_orbits(states, num_exp, num_coef, den_exp, den_coef, horizon: int, tol: float, backend: str | None = None):
    """Dispatch to the numba or numpy kernel (``backend`` forces one)."""
    states = np.ascontiguousarray(states, dtype=np.float64)
    args = (
        states,
        np.ascontiguousarray(num_exp, dtype=np.int64),
        np.ascontiguousarray(num_coef, dtype=np.float64),
        np.ascontiguousarray(den_exp, dtype=np.int64),
        np.ascontiguousarray(den_coef, dtype=np.float64),
        int(horizon),
        float(tol),
    )
    if backend is None:
        backend = "numba" if have_numba() else "numpy"
    if backend == "numba":
        if batch_orbits_numba is None:
            raise RuntimeError("numba is not installed")
        return batch_orbits_numba(*args)
    return batch_orbits_numpy(*args)
