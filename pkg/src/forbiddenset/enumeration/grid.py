"""Raster estimate of a forbidden set by forward iteration from cell centers."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..algebra.maps import DEFAULT_TOL, as_equation
from ..algebra.scalars import is_real_scalar, to_float
from ..fsdesc import RasterEstimate
from ._kernels import batch_orbits, have_numba


def poly_arrays(p, order: int):
    """Exponent matrix and float coefficients of ``p`` over ``lag_names(order)``.

    Columns are ordered oldest first, matching the state vector.
    """
    terms = sorted(p.terms.items())
    exp = np.zeros((len(terms), order), dtype=np.int64)
    coef = np.zeros(len(terms))
    for t, (e, c) in enumerate(terms):
        if not is_real_scalar(c):
            raise ValueError("raster classification needs real coefficients")
        exp[t, :] = e[:order]
        coef[t] = to_float(c)
    return exp, coef


def cell_centers(lo: float, hi: float, resolution: int) -> np.ndarray:
    """Centers ``(2i + 1 - res) * w / (2 res) + mid``, symmetric about ``mid``."""
    i = np.arange(resolution, dtype=np.float64)
    w = hi - lo
    mid = (hi + lo) / 2
    return (2 * i + 1 - resolution) * w / (2 * resolution) + mid


def grid_classify(
    de,
    region: Sequence[float],
    resolution: int,
    horizon: int,
    tol: float = DEFAULT_TOL,
    *,
    slice_point: Sequence[float] | None = None,
    axes: tuple[int, int] = (0, 1),
    backend: str | None = None,
) -> RasterEstimate:
    """Classify a ``resolution x resolution`` grid over ``(xmin, xmax, ymin, ymax)``.

    The horizontal axis is the older coordinate ``x_{-1}`` and the vertical one
    ``x_0``.  Row 0 is the top of the image (largest ``x_0``).  For order ``k > 2``
    the other coordinates come from ``slice_point`` and ``axes`` picks the two
    that vary.  Crash steps are stored per cell (``-1`` survived) together with
    a digest ``atan`` of the horizon value in ``extra["digest"]``.
    """
    de = as_equation(de)
    k = de.order
    xmin, xmax, ymin, ymax = (float(v) for v in region)
    xs = cell_centers(xmin, xmax, resolution)
    ys = cell_centers(ymin, ymax, resolution)[::-1]
    base = np.zeros(k) if slice_point is None else np.asarray(slice_point, dtype=np.float64)
    if base.shape != (k,):
        raise ValueError(f"slice point must have {k} coordinates")
    Y, X = np.meshgrid(ys, xs, indexing="ij")
    states = np.tile(base, (resolution * resolution, 1))
    if k == 1:
        states[:, 0] = X.ravel()
    else:
        states[:, axes[0]] = X.ravel()
        states[:, axes[1]] = Y.ravel()
    ne, nc = poly_arrays(de.map.numerator, k)
    dE, dc = poly_arrays(de.map.denominator, k)
    steps, last = batch_orbits(states, ne, nc, dE, dc, horizon, tol, backend)
    digest = np.where(steps >= 0, np.nan, np.arctan(np.clip(last, -1e300, 1e300)))
    return RasterEstimate(
        region=(xmin, xmax, ymin, ymax),
        resolution=resolution,
        horizon=horizon,
        crash_steps=steps.reshape(resolution, resolution),
        extra={
            "digest": digest.reshape(resolution, resolution),
            "backend": backend or ("numba" if have_numba() else "numpy"),
            "tol": tol,
        },
    )
