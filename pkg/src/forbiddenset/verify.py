"""Forward-iteration check of a forbidden-set description.

Claimed forbidden points (or sampled points of claimed hypersurfaces) are
iterated forward; a description passes when every checked point crashes no
later than its claimed step.  The report records how strong the check was.
"""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra.maps import DEFAULT_TOL, as_equation, crash_step, lag_names
from .algebra.poly import Poly
from .algebra.scalars import is_exact
from .enumeration.grid import cell_centers
from .fsdesc import (
    FinitePointSet,
    HypersurfaceFamily,
    PointSequence,
    ProductHypersurfaceFamily,
    RasterEstimate,
)
from .sampling import sample_on_form

EXACT_VERIFIED = "exact-verified"
FLOAT_VERIFIED = "float-verified"
UNVERIFIED = "unverified"
STATUSES = (EXACT_VERIFIED, FLOAT_VERIFIED, UNVERIFIED)


@dataclass
class VerificationReport:
    """Outcome of a forward check, tied to one equation by its hash."""

    equation_hash: str
    status: str
    depth: int
    tol: float | None = None
    checked: int = 0
    failed: int = 0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown verification status {self.status!r}")

    @property
    def label(self) -> str:
        if self.status == FLOAT_VERIFIED:
            return f"float-verified({self.tol:g})"
        return self.status

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "VerificationReport":
        return cls(**d)


def _check_points(de, points, steps, horizon, tol):
    checked = failed = 0
    exact = True
    for i, p in enumerate(points):
        pt = list(p) if isinstance(p, (tuple, list)) else [p]
        claim = steps[i] if steps and steps[i] is not None else None
        s = crash_step(de, pt, (claim if claim is not None else horizon) + 1, tol)
        checked += 1
        exact = exact and all(is_exact(x) for x in pt)
        if s is None or (claim is not None and s > claim):
            failed += 1
    return checked, failed, exact


def _sample_forms(de, forms, bounds, samples, horizon, tol, seed):
    rng = random.Random(seed)
    checked = failed = 0
    for form, bound in zip(forms, bounds):
        for _ in range(samples):
            pt = sample_on_form(form, rng)
            if pt is None:
                break
            s = crash_step(de, pt, (bound if bound is not None else horizon) + 1, tol)
            checked += 1
            if s is None or (bound is not None and s > bound):
                failed += 1
    return checked, failed


def _product_form(k: int, r) -> Poly:
    names = lag_names(k)
    prod = Poly.constant(1, names)
    for v in names:
        prod = prod * Poly.var(v, names)
    return prod - Poly.constant(r, names)


def verify_description(
    de,
    desc,
    equation_hash: str,
    *,
    horizon: int = 10,
    tol: float = DEFAULT_TOL,
    samples: int = 5,
    seed: int = 0,
) -> VerificationReport:
    """Iterate claimed forbidden points forward and grade the description."""
    de = as_equation(de)
    if isinstance(desc, (FinitePointSet, PointSequence)):
        checked, failed, exact = _check_points(de, desc.points, desc.crash_steps, horizon, tol)
        depth = len(desc.points)
    elif isinstance(desc, HypersurfaceFamily):
        forms = [p for _, p in desc.layers]
        bounds = desc.crash_bounds or [None] * len(forms)
        if any(not p.is_exact() for p in forms):
            return VerificationReport(equation_hash, UNVERIFIED, 0, details={"reason": "inexact forms"})
        checked, failed = _sample_forms(de, forms, bounds, samples, horizon, tol, seed)
        exact = True
        depth = max((d for d, _ in desc.layers), default=0)
    elif isinstance(desc, ProductHypersurfaceFamily):
        forms, bounds = [], []
        for n, r in desc.constants:
            if not is_exact(r):
                continue
            forms.append(_product_form(desc.order, r))
            bounds.append(n)
        checked, failed = _sample_forms(de, forms, bounds, samples, horizon, tol, seed)
        exact = True
        depth = max((n for n, _ in desc.constants), default=0)
    elif isinstance(desc, RasterEstimate):
        return _verify_raster(de, desc, equation_hash, tol, samples * 20, seed)
    else:
        raise TypeError(f"cannot verify {type(desc).__name__}")
    if checked == 0:
        status = UNVERIFIED
    elif failed:
        status = UNVERIFIED
    else:
        status = EXACT_VERIFIED if exact and de.map.is_exact() else FLOAT_VERIFIED
    return VerificationReport(
        equation_hash, status, depth, None if status == EXACT_VERIFIED else tol, checked, failed
    )


def _verify_raster(de, r: RasterEstimate, equation_hash, tol, samples, seed):
    """Recheck random crash cells with the scalar iterator at the raster's tolerance."""
    steps = np.asarray(r.crash_steps)
    res = r.resolution
    lo_x, hi_x, lo_y, hi_y = r.region
    tol = float(r.extra.get("tol", tol))
    cells = np.argwhere(steps >= 0)
    rng = np.random.default_rng(seed)
    if len(cells) > samples:
        cells = cells[rng.choice(len(cells), samples, replace=False)]
    checked = failed = 0
    xs = cell_centers(lo_x, hi_x, res)
    ys = cell_centers(lo_y, hi_y, res)[::-1]
    if de.order == 2:
        for i, j in cells:
            s = crash_step(de, [float(xs[j]), float(ys[i])], int(steps[i, j]) + 1, tol)
            checked += 1
            if s != int(steps[i, j]):
                failed += 1
    status = FLOAT_VERIFIED if checked and not failed else UNVERIFIED
    return VerificationReport(equation_hash, status, r.horizon, tol, checked, failed)
