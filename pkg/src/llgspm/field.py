"""Effective field pieces and the discrete Landau-Lifshitz energy.

The local part of the field is

    fhat = -Q (m2 e2 + m3 e3) + h_e + h_s(m) + f(x, t)

and the full field is ``h = eps Lap_h m + fhat``. ``f`` is an optional
analytic forcing field used by manufactured-solution runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import kernels
from .demag import DemagTensor, build_demag_tensor
from .mesh import MaterialParams, Mesh, VectorField, check_same_mesh

# forcing(x, y, z, t) -> (3, nz, ny, nx) array
Forcing = Callable[[np.ndarray, np.ndarray, np.ndarray, float], np.ndarray]


@dataclass
class FieldContext:
    """Everything needed to evaluate ``fhat`` and ``h`` on one mesh.

    ``Q``, ``eps`` and ``alpha`` are dimensionless. Terms are switched on by
    the ``anisotropy``/``external``/``stray``/``forced`` flags; a disabled
    term is never added.
    """

    mesh: Mesh
    Q: float = 0.0
    eps: float = 1.0
    alpha: float = 0.1
    h_ext: tuple = (0.0, 0.0, 0.0)
    demag: Optional[DemagTensor] = None
    forcing: Optional[Forcing] = None
    source: Optional[Forcing] = None
    anisotropy: bool = False
    external: bool = False
    stray: bool = False
    forced: bool = False
    sourced: bool = False
    material: Optional[MaterialParams] = None
    _forcing_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.h_ext = tuple(float(v) for v in self.h_ext)
        if self.stray:
            if self.demag is None:
                self.demag = build_demag_tensor(self.mesh)
            check_same_mesh(self.demag, self.mesh)
        if self.forced and self.forcing is None:
            raise ValueError("forced=True requires a forcing function")
        if self.sourced and self.source is None:
            raise ValueError("sourced=True requires a source function")
        if self.Q < 0 or self.eps <= 0 or self.alpha < 0:
            raise ValueError("need Q >= 0, eps > 0, alpha >= 0")

    @classmethod
    def from_material(cls, mesh: Mesh, material: MaterialParams, **kw) -> "FieldContext":
        kw.setdefault("anisotropy", material.Ku > 0)
        return cls(mesh, Q=material.Q, eps=material.eps, alpha=material.alpha,
                   material=material, **kw)

    def with_field(self, h_ext) -> "FieldContext":
        """Copy with a different uniform applied field (demag tensor shared)."""
        return replace(self, h_ext=tuple(h_ext), external=True, _forcing_cache={})

    def _evaluate(self, key, func, t):
        # schemes evaluate the same time level several times per step
        hit = self._forcing_cache.get(key)
        if hit is not None and hit[0] == t:
            return hit[1]
        centers = self._forcing_cache.get("centers")
        if centers is None:
            centers = self._forcing_cache["centers"] = self.mesh.cell_centers()
        val = np.asarray(func(*centers, t), dtype=float)
        self._forcing_cache[key] = (t, val)
        return val

    def forcing_at(self, t: float) -> np.ndarray:
        """Field-form forcing added to ``fhat``."""
        return self._evaluate("forcing", self.forcing, t)

    def source_at(self, t: float) -> np.ndarray:
        """Additive source of ``m_t = ... + f``, applied by the steppers."""
        return self._evaluate("source", self.source, t)

    @property
    def static_field(self) -> Optional[np.ndarray]:
        if not self.external:
            return None
        return np.asarray(self.h_ext)


def local_field_array(ctx: FieldContext, m: np.ndarray, t: float, stats=None) -> np.ndarray:
    """``fhat`` for a raw ``(3, nz, ny, nx)`` array.

    The stray field is recomputed from ``m`` when enabled; ``stats`` (if
    given) records it as one FFT execution.
    """
    out = np.zeros_like(m)
    if ctx.anisotropy and ctx.Q != 0.0:
        out[1] -= ctx.Q * m[1]
        out[2] -= ctx.Q * m[2]
    if ctx.external:
        out[0] += ctx.h_ext[0]
        out[1] += ctx.h_ext[1]
        out[2] += ctx.h_ext[2]
    if ctx.stray:
        out += ctx.demag.apply(m)
    if ctx.forced:
        out += ctx.forcing_at(t)
    if stats is not None:
        stats.add_fft(1)
    return out


def local_field_fhat(ctx: FieldContext, m: VectorField, t: float = 0.0, stats=None) -> VectorField:
    check_same_mesh(ctx.mesh, m)
    return VectorField(m.mesh, local_field_array(ctx, m.data, t, stats), copy=False)


def exchange_array(ctx: FieldContext, m: np.ndarray) -> np.ndarray:
    dx, dy, dz = ctx.mesh.spacing
    return np.stack([ctx.eps * kernels.laplacian(m[i], dx, dy, dz) for i in range(3)])


def full_field_h(ctx: FieldContext, m: VectorField, t: float = 0.0, stats=None) -> VectorField:
    """``h = eps Lap_h m + fhat``."""
    check_same_mesh(ctx.mesh, m)
    h = exchange_array(ctx, m.data) + local_field_array(ctx, m.data, t, stats)
    return VectorField(m.mesh, h, copy=False)


def exchange_energy_density(mesh: Mesh, m: np.ndarray) -> float:
    """Sum over interior faces of ``|m_a - m_b|^2 / d^2`` divided by the cell count.

    Its gradient with respect to ``m`` is ``-2 Lap_h m / n_cells``.
    """
    total = 0.0
    for axis, d in zip((3, 2, 1), mesh.spacing):
        if m.shape[axis] > 1:
            diff = np.diff(m, axis=axis)
            total += np.sum(diff * diff) / (d * d)
    return total / mesh.n_cells


def energy_terms(ctx: FieldContext, m: VectorField) -> dict:
    """Per-term dimensionless energy densities (averaged over the cells)."""
    check_same_mesh(ctx.mesh, m)
    a = m.data
    terms = {"exchange": 0.5 * ctx.eps * exchange_energy_density(ctx.mesh, a),
             "anisotropy": 0.0, "zeeman": 0.0, "stray": 0.0}
    if ctx.anisotropy:
        terms["anisotropy"] = 0.5 * ctx.Q * float(np.mean(a[1] ** 2 + a[2] ** 2))
    if ctx.external:
        he = np.asarray(ctx.h_ext)
        terms["zeeman"] = -float(np.mean(np.tensordot(he, a, axes=(0, 0))))
    if ctx.stray:
        hs = ctx.demag.apply(a)
        terms["stray"] = -0.5 * float(np.mean(np.sum(hs * a, axis=0)))
    return terms


def total_energy(ctx: FieldContext, m: VectorField) -> float:
    """Dimensionless energy per unit volume.

    ``(1/2) mean[eps |grad_h m|^2 + Q (m2^2 + m3^2) - 2 h_e.m - h_s.m]``, with
    the gradient taken on cell faces and zero flux through the boundary.
    """
    return sum(energy_terms(ctx, m).values())
