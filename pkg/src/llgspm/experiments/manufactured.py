"""Manufactured exact solutions of the simplified (``eps = 1``) LLG equation.

Both cases use ``m_e = (cos p sin t, sin p sin t, cos t)`` with
``p = xb`` (1D) or ``p = xb yb zb`` (3D), ``xb = x^2 (1 - x)^2``, and the
additive forcing ``f = m_t + m x Lap m + alpha m x (m x Lap m)``.

By default ``f`` is applied as an additive source by the steppers. As an
independent route, ``f`` can also be injected through ``fhat``: since ``f``
is tangent to ``m_e``, the field ``F = (alpha f + m_e x f) / (1 + alpha^2)``
satisfies ``-m_e x F - alpha m_e x (m_e x F) = f`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..field import FieldContext
from ..mesh import Mesh, VectorField


def bump(s):
    """``s^2 (1 - s)^2`` and its first two derivatives."""
    b = s * s * (1.0 - s) ** 2
    db = 2.0 * s * (1.0 - s) * (1.0 - 2.0 * s)
    d2b = 2.0 - 12.0 * s + 12.0 * s * s
    return b, db, d2b


def cross(a, b):
    return np.stack([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def _exact(p, t):
    st, ct = np.sin(t), np.cos(t)
    return np.stack([np.cos(p) * st, np.sin(p) * st, np.full_like(p, ct)])


def _laplacian(p, g2, lap, t):
    st = np.sin(t)
    cp, sp = np.cos(p), np.sin(p)
    return np.stack([st * (-cp * g2 - sp * lap), st * (-sp * g2 + cp * lap), np.zeros_like(p)])


def _forcing(alpha, p, g2, lap, t):
    st, ct = np.sin(t), np.cos(t)
    cp, sp = np.cos(p), np.sin(p)
    m = np.stack([cp * st, sp * st, np.full_like(p, ct)])
    mt = np.stack([cp * ct, sp * ct, np.full_like(p, -st)])
    mxl = cross(m, _laplacian(p, g2, lap, t))
    return mt + mxl + alpha * cross(m, mxl)


@dataclass(frozen=True)
class ManufacturedCase:
    dimension: int
    alpha: float
    T: float
    lengths: tuple = (1.0, 1.0, 1.0)
    name: str = ""

    def phase(self, x, y, z):
        """``p``, ``|grad p|^2`` and ``Lap p``."""
        bx, dbx, d2bx = bump(np.asarray(x, dtype=float))
        if self.dimension == 1:
            return bx, dbx * dbx, d2bx
        by, dby, d2by = bump(np.asarray(y, dtype=float))
        bz, dbz, d2bz = bump(np.asarray(z, dtype=float))
        p = bx * by * bz
        gx, gy, gz = dbx * by * bz, bx * dby * bz, bx * by * dbz
        lap = d2bx * by * bz + bx * d2by * bz + bx * by * d2bz
        return p, gx * gx + gy * gy + gz * gz, lap

    def exact(self, x, y, z, t):
        p, _, _ = self.phase(x, y, z)
        return _exact(p, t)

    def time_derivative(self, x, y, z, t):
        p, _, _ = self.phase(x, y, z)
        st, ct = np.sin(t), np.cos(t)
        return np.stack([np.cos(p) * ct, np.sin(p) * ct, np.full_like(p, -st)])

    def laplacian(self, x, y, z, t):
        return _laplacian(*self.phase(x, y, z), t)

    def forcing(self, x, y, z, t):
        """Additive forcing ``f`` of ``m_t = -m x Lap m - alpha m x (m x Lap m) + f``."""
        return _forcing(self.alpha, *self.phase(x, y, z), t)

    def bound_forcing(self, mesh: Mesh):
        """``forcing`` restricted to the cell centers of ``mesh``, with the
        time-independent phase factors evaluated once."""
        x, y, z = mesh.cell_centers()
        parts = self.phase(x, y, z)

        def f(xx, yy, zz, t):
            if np.shape(xx) != parts[0].shape:
                return self.forcing(xx, yy, zz, t)
            return _forcing(self.alpha, *parts, t)

        return f

    def field_forcing(self, x, y, z, t):
        """Field-form forcing ``F`` with the same effect as ``f`` on the LLG right-hand side."""
        m = self.exact(x, y, z, t)
        f = self.forcing(x, y, z, t)
        return (self.alpha * f + cross(m, f)) / (1.0 + self.alpha**2)

    def mesh(self, counts) -> Mesh:
        counts = tuple(counts) + (1,) * (3 - len(tuple(counts)))
        if self.dimension == 1:
            counts = (counts[0], 1, 1)
            return Mesh(counts[0], 1, 1, self.lengths[0] / counts[0], 1.0, 1.0)
        return Mesh.from_box(self.lengths, counts)

    def context(self, mesh: Mesh, mode: str = "source") -> FieldContext:
        """Context for the simplified equation with the forcing applied as
        an additive ``source`` (default) or through ``fhat`` (``"field"``)."""
        if mode == "source":
            return FieldContext(mesh, Q=0.0, eps=1.0, alpha=self.alpha,
                                source=self.bound_forcing(mesh), sourced=True)
        if mode == "field":
            return FieldContext(mesh, Q=0.0, eps=1.0, alpha=self.alpha,
                                forcing=self.field_forcing, forced=True)
        raise ValueError(f"unknown forcing mode {mode!r}")

    def exact_field(self, mesh: Mesh, t: float) -> VectorField:
        x, y, z = mesh.cell_centers()
        return VectorField(mesh, self.exact(x, y, z, t))

    def residual(self, x, y, z, t, h_t: float = 1e-3, h_x: float = 6e-3) -> np.ndarray:
        """PDE residual at points, with derivatives by 6th-order finite differences.

        Independent of the closed-form derivatives above; used as a self-check.
        The default ``h_x`` balances truncation against the roundoff of the
        second-difference stencil (about ``7 eps_mach / h_x^2`` per axis).
        """
        c1 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0
        c2 = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / 180.0
        offs = np.arange(-3, 4)
        m = self.exact(x, y, z, t)
        mt = sum(c * self.exact(x, y, z, t + o * h_t) for c, o in zip(c1, offs)) / h_t
        lap = sum(c * self.exact(x + o * h_x, y, z, t) for c, o in zip(c2, offs)) / h_x**2
        if self.dimension == 3:
            lap = lap + sum(c * self.exact(x, y + o * h_x, z, t) for c, o in zip(c2, offs)) / h_x**2
            lap = lap + sum(c * self.exact(x, y, z + o * h_x, t) for c, o in zip(c2, offs)) / h_x**2
        mxl = cross(m, lap)
        rhs = -mxl - self.alpha * cross(m, mxl) + self.forcing(x, y, z, t)
        return mt - rhs


CASE_1D = ManufacturedCase(dimension=1, alpha=1e-5, T=5e-2, lengths=(1.0, 1.0, 1.0), name="1d")
CASE_3D = ManufacturedCase(dimension=3, alpha=0.01, T=1e-5, lengths=(2.0, 1.0, 0.2), name="3d")

CASES = {"1d": CASE_1D, "3d": CASE_3D}
