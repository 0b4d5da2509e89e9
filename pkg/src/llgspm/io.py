"""Snapshot files, CSV tables and JSON reports.

Snapshot CSV::

    x,y,z,m1,m2,m3
    0.0050000000000000001,0.5,0.5,0.70710678118654757,0.70710678118654757,0

one row per cell, x fastest, then y, then z; every float printed with 17
significant digits (``%.17g``), so parsing gives back the exact doubles.

Snapshot binary (all little-endian float64)::

    nx ny nz dx dy dz            6 x 8 bytes header (counts stored as floats)
    m1 m2 m3                     3 x 8 bytes per cell, same cell order as the CSV
"""

from __future__ import annotations

import csv
import json
import math
import os
from pathlib import Path

import numpy as np

from .errors import ParseError
from .mesh import Mesh, VectorField, in_plane_angle_map

SNAPSHOT_HEADER = ["x", "y", "z", "m1", "m2", "m3"]
_LE = np.dtype("<f8")


def fmt(v: float) -> str:
    return f"{float(v):.17g}"


def dump_snapshot_csv(fh, f: VectorField):
    """Write the CSV form of ``f`` to an open text stream."""
    x, y, z = f.mesh.cell_centers()
    cols = [x.ravel(), y.ravel(), z.ravel(), *(f.data[i].ravel() for i in range(3))]
    fh.write(",".join(SNAPSHOT_HEADER) + "\n")
    for row in zip(*cols):
        fh.write(",".join(fmt(v) for v in row) + "\n")


def write_snapshot_csv(path, f: VectorField):
    with open(path, "w", newline="") as fh:
        dump_snapshot_csv(fh, f)


def _fit_axis(centers: np.ndarray) -> tuple[float, float]:
    """``(origin, d)`` whose cell centers reproduce ``centers`` bit for bit if possible."""
    n = centers.size
    if n == 1:
        # the spacing of a single cell is not recoverable; pick one that
        # reproduces the center exactly (2c + |c| is exact for c < 0)
        c = float(centers[0])
        if c > 0:
            return 0.0, 2.0 * c
        if c < 0:
            return 2.0 * c, -2.0 * c
        return -0.5, 1.0
    else:
        d0 = (centers[-1] - centers[0]) / (n - 1)
    idx = np.arange(n) + 0.5
    for dd in _ulp_neighbours(d0, 16):
        for oo in _ulp_neighbours(centers[0] - 0.5 * dd, 4):
            if np.array_equal(oo + idx * dd, centers):
                return float(oo), float(dd)
    return float(centers[0] - 0.5 * d0), float(d0)


def _ulp_neighbours(v: float, k: int) -> list:
    out = [float(v)]
    lo = hi = float(v)
    for _ in range(k):
        lo, hi = float(np.nextafter(lo, -np.inf)), float(np.nextafter(hi, np.inf))
        out += [lo, hi]
    return out


def read_snapshot_csv(path, mesh: Mesh | None = None) -> VectorField:
    """Read a snapshot; the mesh is inferred from the coordinates unless given."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SNAPSHOT_HEADER:
            raise ParseError(f"expected header {','.join(SNAPSHOT_HEADER)!r}", 1)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 6:
                raise ParseError(f"expected 6 columns, got {len(row)}", lineno)
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
    if not rows:
        raise ParseError("snapshot has no cells", 2)
    data = np.array(rows)
    if mesh is None:
        xs, ys, zs = (np.unique(data[:, k]) for k in range(3))
        (ox, dx), (oy, dy), (oz, dz) = (_fit_axis(c) for c in (xs, ys, zs))
        mesh = Mesh(xs.size, ys.size, zs.size, dx, dy, dz, (ox, oy, oz))
    if data.shape[0] != mesh.n_cells:
        raise ParseError(f"expected {mesh.n_cells} cells, got {data.shape[0]}")
    x, y, z = mesh.cell_centers()
    if not (np.allclose(data[:, 0], x.ravel()) and np.allclose(data[:, 1], y.ravel())
            and np.allclose(data[:, 2], z.ravel())):
        raise ParseError("cell coordinates are not in x-fastest order on a uniform grid")
    return VectorField.from_cells(mesh, data[:, 3:])


def write_snapshot_binary(path, f: VectorField):
    m = f.mesh
    header = np.array([m.nx, m.ny, m.nz, m.dx, m.dy, m.dz], dtype=_LE)
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(np.ascontiguousarray(f.cells(), dtype=_LE).tobytes())


def read_snapshot_binary(path) -> VectorField:
    raw = Path(path).read_bytes()
    if len(raw) < 48:
        raise ParseError("binary snapshot shorter than its header")
    h = np.frombuffer(raw[:48], dtype=_LE)
    nx, ny, nz = (int(v) for v in h[:3])
    if any(float(int(v)) != v for v in h[:3]):
        raise ParseError("non-integer cell counts in binary header")
    mesh = Mesh(nx, ny, nz, *(float(v) for v in h[3:]))
    body = np.frombuffer(raw[48:], dtype=_LE)
    if body.size != 3 * mesh.n_cells:
        raise ParseError(f"expected {3 * mesh.n_cells} values, got {body.size}")
    return VectorField.from_cells(mesh, body.reshape(-1, 3))


def read_snapshot(path) -> VectorField:
    """Dispatch on the extension: ``.bin`` is binary, anything else CSV."""
    if str(path).endswith(".bin"):
        return read_snapshot_binary(path)
    return read_snapshot_csv(path)


def write_snapshot(path, f: VectorField):
    if str(path).endswith(".bin"):
        write_snapshot_binary(path, f)
    else:
        write_snapshot_csv(path, f)


def centered_slice(f: VectorField) -> int:
    return f.mesh.nz // 2


def write_angle_map_csv(path, f: VectorField, k: int | None = None):
    """In-plane angle to the x axis on the z-slice ``k`` (default: centered)."""
    k = centered_slice(f) if k is None else k
    ang, degenerate = in_plane_angle_map(f)
    x, y, _ = f.mesh.cell_centers()
    with open(path, "w", newline="") as fh:
        fh.write("x,y,angle,degenerate\n")
        for xi, yi, a, d in zip(x[k].ravel(), y[k].ravel(), ang[k].ravel(), degenerate[k].ravel()):
            fh.write(f"{fmt(xi)},{fmt(yi)},{fmt(a)},{int(d)}\n")


def write_vector_slice_csv(path, f: VectorField, k: int | None = None):
    """In-plane arrows ``(m1, m2)`` on the z-slice ``k`` (default: centered)."""
    k = centered_slice(f) if k is None else k
    x, y, _ = f.mesh.cell_centers()
    with open(path, "w", newline="") as fh:
        fh.write("x,y,m1,m2\n")
        for row in zip(x[k].ravel(), y[k].ravel(), f.data[0, k].ravel(), f.data[1, k].ravel()):
            fh.write(",".join(fmt(v) for v in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        items = sorted(obj) if isinstance(obj, set) else obj
        return [_jsonable(v) for v in items]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def write_report(path, report: dict):
    """``report.json``: sorted keys, non-finite floats written as null."""
    with open(path, "w") as fh:
        json.dump(_jsonable(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


def output_dir(default) -> Path:
    """Output directory, overridable through ``LLGSPM_OUTPUT_DIR``."""
    p = Path(os.environ.get("LLGSPM_OUTPUT_DIR") or default)
    p.mkdir(parents=True, exist_ok=True)
    return p
