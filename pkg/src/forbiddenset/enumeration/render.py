"""Plain-file outputs: PPM rasters with a JSON sidecar, SVG point plots, CSV curves."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..fsdesc import RasterEstimate

CRASH_GRAY = (128, 128, 128)


def raster_rgb(r: RasterEstimate) -> np.ndarray:
    """``(res, res, 3)`` uint8 image: gray for crashes, a blue-red ramp otherwise.

    The ramp is driven by the clamped ``atan`` digest of the horizon value.
    """
    steps = np.asarray(r.crash_steps)
    digest = np.asarray(r.extra.get("digest", np.zeros(steps.shape)), dtype=np.float64)
    t = np.nan_to_num((digest + np.pi / 2) / np.pi, nan=0.5)
    t = np.clip(t, 0.0, 1.0)
    img = np.empty(steps.shape + (3,), dtype=np.uint8)
    img[..., 0] = np.round(255 * t).astype(np.uint8)
    img[..., 1] = np.round(255 * (1 - np.abs(2 * t - 1)) * 0.8).astype(np.uint8)
    img[..., 2] = np.round(255 * (1 - t)).astype(np.uint8)
    img[steps >= 0] = CRASH_GRAY
    return img


def write_ppm(r: RasterEstimate, path, sidecar: dict | None = None) -> tuple[Path, Path]:
    """Binary PPM (P6) plus ``<path>.json`` with the raster parameters."""
    path = Path(path)
    img = raster_rgb(r)
    h, w, _ = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
    meta = {
        "region": list(r.region),
        "resolution": r.resolution,
        "horizon": r.horizon,
        "generator": r.generator,
        "forbidden_fraction": r.forbidden_fraction(),
        "orientation": "columns: x_-1 increasing left to right; rows: x_0 decreasing top to bottom",
        "crash_color": list(CRASH_GRAY),
    }
    meta.update({k: v for k, v in r.extra.items() if isinstance(v, (str, int, float))})
    if sidecar:
        meta.update(sidecar)
    side = path.with_suffix(path.suffix + ".json")
    side.write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    return path, side


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6":
        raise ValueError("not a binary PPM")
    w, h = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)


def write_steps_csv(r: RasterEstimate, path) -> Path:
    path = Path(path)
    np.savetxt(path, np.asarray(r.crash_steps), fmt="%d", delimiter=",")
    return path


def write_curve_csv(rows: Iterable[tuple[float, float, int]], path) -> Path:
    """Curve samples as ``x,y,layer`` rows."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "y", "layer"])
        for x, y, layer in rows:
            wr.writerow([repr(float(x)), repr(float(y)), int(layer)])
    return path


def write_points_svg(points: Sequence[complex], path, size: int = 600, radius: float = 1.5, highlight: Sequence[complex] = ()) -> Path:
    """Scatter of complex (or real) points; ``highlight`` points drawn in green."""
    path = Path(path)
    z = np.asarray([complex(p) for p in points] + [complex(p) for p in highlight], dtype=np.complex128)
    if z.size == 0:
        z = np.zeros(1, dtype=np.complex128)
    lo_x, hi_x = z.real.min(), z.real.max()
    lo_y, hi_y = z.imag.min(), z.imag.max()
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-9) * 1.1
    cx, cy = (hi_x + lo_x) / 2, (hi_y + lo_y) / 2

    def sx(p):
        return (p.real - cx) / span * size + size / 2, size / 2 - (p.imag - cy) / span * size

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
           f'<rect width="{size}" height="{size}" fill="white"/>']
    for p in points:
        x, y = sx(complex(p))
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{radius}" fill="black"/>')
    for p in highlight:
        x, y = sx(complex(p))
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{radius * 2}" fill="green"/>')
    out.append("</svg>")
    path.write_text("\n".join(out) + "\n")
    return path


def write_polyline_svg(paths: Sequence[Sequence[tuple[float, float]]], path, size: int = 600) -> Path:
    """Polylines (e.g. cobweb diagrams or sampled curves) in a common frame."""
    path = Path(path)
    pts = np.asarray([p for line in paths for p in line] or [(0.0, 0.0)], dtype=np.float64)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = max(float((hi - lo).max()), 1e-9) * 1.1
    mid = (hi + lo) / 2
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
           f'<rect width="{size}" height="{size}" fill="white"/>']
    for line in paths:
        coords = " ".join(
            f"{(x - mid[0]) / span * size + size / 2:.3f},{size / 2 - (y - mid[1]) / span * size:.3f}" for x, y in line
        )
        out.append(f'<polyline points="{coords}" fill="none" stroke="black" stroke-width="1"/>')
    out.append("</svg>")
    path.write_text("\n".join(out) + "\n")
    return path
