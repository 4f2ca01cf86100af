"""Forbidden-set descriptions and their JSON records.

Every method that produces a forbidden set returns one of the description
classes below.  ``records()`` flattens a description into JSON-ready dicts of the
shape ``{generator, depth, point | form, verified_crash_step}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

from .algebra.poly import Poly
from .algebra.scalars import Scalar, scalar_from_json, scalar_to_json


@dataclass(frozen=True)
class FsRecord:
    generator: str
    depth: int
    point: tuple | None = None
    form: str | None = None
    verified_crash_step: int | None = None

    def to_json(self) -> dict:
        out: dict[str, Any] = {"generator": self.generator, "depth": self.depth}
        if self.point is not None:
            out["point"] = [scalar_to_json(x) for x in self.point]
        if self.form is not None:
            out["form"] = self.form
        out["verified_crash_step"] = self.verified_crash_step
        return out

    @classmethod
    def from_json(cls, d: dict) -> "FsRecord":
        point = tuple(scalar_from_json(x) for x in d["point"]) if "point" in d else None
        return cls(d["generator"], int(d["depth"]), point, d.get("form"), d.get("verified_crash_step"))


def dump_records(records: Sequence[FsRecord]) -> str:
    return json.dumps([r.to_json() for r in records], indent=1, sort_keys=True)


def load_records(text: str) -> list[FsRecord]:
    return [FsRecord.from_json(d) for d in json.loads(text)]


@dataclass
class FinitePointSet:
    """A finite list of forbidden initial points, in generation order."""

    points: list
    generator: str
    crash_steps: list | None = None
    kind: str = "finite"

    def __len__(self):
        return len(self.points)

    def records(self) -> list[FsRecord]:
        steps = self.crash_steps or [None] * len(self.points)
        return [
            FsRecord(self.generator, i, _as_tuple(p), None, s)
            for i, (p, s) in enumerate(zip(self.points, steps))
        ]


@dataclass
class PointSequence:
    """The first points of an infinite forbidden sequence plus its limit (if known)."""

    points: list
    generator: str
    limit: Scalar | None = None
    crash_steps: list | None = None
    kind: str = "sequence"

    def __len__(self):
        return len(self.points)

    def records(self) -> list[FsRecord]:
        steps = self.crash_steps or [None] * len(self.points)
        return [
            FsRecord(self.generator, i, _as_tuple(p), None, s)
            for i, (p, s) in enumerate(zip(self.points, steps))
        ]


@dataclass
class HypersurfaceFamily:
    """Layers ``{form = 0}`` of polynomial forms in the initial-state variables."""

    variables: tuple[str, ...]
    layers: list[tuple[int, Poly]]
    generator: str
    crash_bounds: list | None = None
    complete: bool = False
    kind: str = "hypersurfaces"
    truncated: bool = False

    def forms(self, depth: int | None = None) -> list[Poly]:
        return [p for d, p in self.layers if depth is None or d == depth]

    def records(self) -> list[FsRecord]:
        bounds = self.crash_bounds or [None] * len(self.layers)
        return [FsRecord(self.generator, d, None, f"{p} = 0", b) for (d, p), b in zip(self.layers, bounds)]


@dataclass
class ProductHypersurfaceFamily:
    """Generalized hyperbolas ``x_{-k} * ... * x_0 = r_n``."""

    order: int
    constants: list[tuple[int, Scalar]]
    generator: str
    finite: bool = False
    kind: str = "product-hypersurfaces"

    def records(self) -> list[FsRecord]:
        lhs = "*".join(f"x{j}" for j in range(self.order - 1, -1, -1))
        from .algebra.scalars import format_scalar

        return [FsRecord(self.generator, d, None, f"{lhs} = {format_scalar(r)}", None) for d, r in self.constants]


@dataclass
class RasterEstimate:
    """Grid classification: per-cell crash step (``-1`` survived) over a region."""

    region: tuple[float, float, float, float]
    resolution: int
    horizon: int
    crash_steps: Any
    generator: str = "grid"
    kind: str = "raster"
    extra: dict = field(default_factory=dict)

    def forbidden_fraction(self) -> float:
        import numpy as np

        return float(np.mean(np.asarray(self.crash_steps) >= 0))

    def records(self) -> list[FsRecord]:
        import numpy as np

        steps = np.asarray(self.crash_steps)
        out = []
        for depth in sorted(set(int(s) for s in np.unique(steps) if s >= 0)):
            count = int(np.sum(steps == depth))
            out.append(FsRecord(self.generator, depth, None, f"{count} cells", depth))
        return out


FsDescription = FinitePointSet | PointSequence | HypersurfaceFamily | ProductHypersurfaceFamily | RasterEstimate


def _as_tuple(p) -> tuple:
    if isinstance(p, (tuple, list)):
        return tuple(p)
    return (p,)
