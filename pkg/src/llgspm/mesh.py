"""Cell-centered structured grids, 3-component fields and material constants.

Arrays are stored as ``(nz, ny, nx)`` per component so that x is the fastest
varying index in memory; a vector field is a ``(3, nz, ny, nx)`` array.
Neumann boundaries are realized by clamped neighbor indices, no ghost layer
is ever stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MeshMismatch, ZeroVector

# below this a cell norm is treated as exactly zero by the projection
ZERO_NORM = 1e-300


@dataclass(frozen=True)
class Mesh:
    """Uniform cell-centered grid on ``[o, o + n*d]`` per axis (dimensionless)."""

    nx: int
    ny: int = 1
    nz: int = 1
    dx: float = 1.0
    dy: float = 1.0
    dz: float = 1.0
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if int(n) != n or n < 1:
                raise ValueError(f"{name} must be a positive integer, got {n!r}")
            object.__setattr__(self, name, int(n))
        for name in ("dx", "dy", "dz"):
            d = float(getattr(self, name))
            if not (d > 0.0 and math.isfinite(d)):
                raise ValueError(f"{name} must be positive and finite, got {d!r}")
            object.__setattr__(self, name, d)
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))

    @classmethod
    def from_box(cls, lengths, counts, origin=(0.0, 0.0, 0.0)) -> "Mesh":
        """Mesh covering a box of the given side lengths with the given cell counts."""
        lx, ly, lz = lengths
        nx, ny, nz = counts
        return cls(nx, ny, nz, lx / nx, ly / ny, lz / nz, origin)

    @property
    def shape(self) -> tuple[int, int, int]:
        """Array shape of a scalar field, ``(nz, ny, nx)``."""
        return (self.nz, self.ny, self.nx)

    @property
    def counts(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def spacing(self) -> tuple[float, float, float]:
        return (self.dx, self.dy, self.dz)

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def lengths(self) -> tuple[float, float, float]:
        return (self.nx * self.dx, self.ny * self.dy, self.nz * self.dz)

    def axis_centers(self, axis: int) -> np.ndarray:
        """Cell-center coordinates ``o + (i - 1/2) d`` for ``i = 1..n`` along one axis."""
        n = self.counts[axis]
        d = self.spacing[axis]
        return self.origin[axis] + (np.arange(n) + 0.5) * d

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable ``(x, y, z)`` coordinate arrays of shape ``(nz, ny, nx)``."""
        z, y, x = np.meshgrid(self.axis_centers(2), self.axis_centers(1),
                              self.axis_centers(0), indexing="ij")
        return x, y, z

    def scalar(self, fill=0.0) -> np.ndarray:
        return np.full(self.shape, fill, dtype=float)


class VectorField:
    """A 3-component field on a :class:`Mesh`.

    ``data`` has shape ``(3, nz, ny, nx)`` and is read-only; operations return
    new fields. ``unit`` marks fields produced by the sphere projection.
    """

    __slots__ = ("mesh", "data", "unit")

    def __init__(self, mesh: Mesh, data, unit: bool = False, copy: bool = True):
        arr = np.array(data, dtype=float, copy=copy)
        if arr.ndim == 1 and arr.shape == (3,):
            arr = np.broadcast_to(arr[:, None, None, None], (3,) + mesh.shape).copy()
        if arr.shape != (3,) + mesh.shape:
            raise ValueError(f"field data shape {arr.shape} does not match mesh {(3,) + mesh.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field contains non-finite values")
        arr.flags.writeable = False
        self.mesh = mesh
        self.data = arr
        self.unit = unit

    @classmethod
    def uniform(cls, mesh: Mesh, vec) -> "VectorField":
        v = np.asarray(vec, dtype=float)
        return cls(mesh, v, unit=abs(np.linalg.norm(v) - 1.0) <= 1e-12)

    @classmethod
    def from_cells(cls, mesh: Mesh, triples) -> "VectorField":
        """Build from an ``(n_cells, 3)`` array in x-fastest cell order."""
        t = np.asarray(triples, dtype=float).reshape(mesh.n_cells, 3)
        return cls(mesh, t.T.reshape((3,) + mesh.shape))

    def cells(self) -> np.ndarray:
        """``(n_cells, 3)`` view in x-fastest, then y, then z order."""
        return self.data.reshape(3, -1).T

    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(self.data * self.data, axis=0))

    def component(self, i: int) -> np.ndarray:
        return self.data[i]

    def __repr__(self):
        return f"VectorField(mesh={self.mesh!r}, unit={self.unit})"


def check_same_mesh(a, b):
    ma = a.mesh if hasattr(a, "mesh") else a
    mb = b.mesh if hasattr(b, "mesh") else b
    if ma != mb:
        raise MeshMismatch(f"mesh mismatch: {ma} vs {mb}")


def normalize_array(v: np.ndarray) -> np.ndarray:
    """Divide each cell vector of a ``(3, ...)`` array by its norm."""
    norm = np.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    bad = norm < ZERO_NORM
    if bad.any():
        k, j, i = np.unravel_index(np.flatnonzero(bad)[0], norm.shape)
        raise ZeroVector((i, j, k))
    return v / norm


def project_onto_sphere(f: VectorField) -> VectorField:
    """Pointwise normalization ``m / |m|``; the result is tagged unit."""
    return VectorField(f.mesh, normalize_array(f.data), unit=True, copy=False)


def average_magnetization(f: VectorField) -> np.ndarray:
    return f.data.reshape(3, -1).mean(axis=1)


def max_norm_error(a: VectorField, b: VectorField) -> float:
    check_same_mesh(a, b)
    return float(np.max(np.abs(a.data - b.data)))


def in_plane_angle_map(f: VectorField) -> tuple[np.ndarray, np.ndarray]:
    """Angle of ``(m1, m2)`` to the x axis in ``(-pi, pi]``.

    Returns the ``(nz, ny, nx)`` angle array and a boolean mask flagging cells
    whose in-plane part vanishes (angle reported as 0 there).
    """
    m1, m2 = f.data[0], f.data[1]
    degenerate = (m1 == 0.0) & (m2 == 0.0)
    ang = np.arctan2(m2, m1)
    # atan2(+0, -1) = pi already; fold the -pi produced by a signed zero
    ang = np.where(ang == -np.pi, np.pi, ang)
    ang = np.where(degenerate, 0.0, ang)
    return ang, degenerate


MU0 = 4e-7 * math.pi


@dataclass(frozen=True)
class MaterialParams:
    """Physical constants (SI) and the derived dimensionless groups.

    Defaults are permalloy-like. ``L`` is the length scale used for
    ``x -> L x``; time is measured in units of ``1 / (mu0 gamma Ms)``.
    """

    Ms: float = 8.0e5
    A_ex: float = 1.3e-11
    Ku: float = 1.0e2
    gamma: float = 1.76e11
    mu0: float = MU0
    L: float = 1.0e-6
    alpha: float = 0.1

    def __post_init__(self):
        if self.Ms <= 0 or self.gamma <= 0 or self.mu0 <= 0 or self.L <= 0:
            raise ValueError("Ms, gamma, mu0 and L must be positive")
        if self.Q < 0 or self.eps <= 0 or self.alpha < 0:
            raise ValueError("need Q >= 0, eps > 0, alpha >= 0")

    @property
    def Q(self) -> float:
        return self.Ku / (self.mu0 * self.Ms**2)

    @property
    def eps(self) -> float:
        return self.A_ex / (self.mu0 * self.Ms**2 * self.L**2)

    @property
    def time_unit(self) -> float:
        """Seconds per dimensionless time unit."""
        return 1.0 / (self.mu0 * self.gamma * self.Ms)

    @property
    def exchange_length(self) -> float:
        return math.sqrt(self.A_ex / (self.mu0 * self.Ms**2))

    def to_dimensionless_time(self, seconds: float) -> float:
        return seconds / self.time_unit

    def to_seconds(self, t: float) -> float:
        return t * self.time_unit

    def to_dimensionless_length(self, metres: float) -> float:
        return metres / self.L

    def field_from_tesla(self, b: float) -> float:
        """Applied field ``mu0 H`` in tesla to the dimensionless ``H / Ms``."""
        return b / (self.mu0 * self.Ms)

    def field_to_tesla(self, h: float) -> float:
        return h * self.mu0 * self.Ms
