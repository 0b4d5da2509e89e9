"""Stray (demagnetizing) field by zero-padded FFT convolution.

The kernel is Newell's cell-averaged demagnetizing tensor between uniformly
magnetized rectangular cells, so the self-cell entry is finite and the field
is ``h_s = K * m`` with ``K = -N`` (``trace N(0) = 1``). All lengths are in
the same (dimensionless) units as the mesh; the kernel is scale invariant.
"""

from __future__ import annotations

import numpy as np
import scipy.fft

from .mesh import Mesh, VectorField, check_same_mesh

_FOUR_PI = 4.0 * np.pi

# ordering of the six independent tensor entries
COMPONENTS = ("xx", "xy", "xz", "yy", "yz", "zz")
_PAIR_INDEX = {(0, 0): 0, (0, 1): 1, (0, 2): 2, (1, 1): 3, (1, 2): 4, (2, 2): 5}


def _ratio(num, den):
    # every use multiplies by a coefficient that vanishes where den == 0
    safe = np.where(den == 0.0, 1.0, den)
    return np.where(den == 0.0, 0.0, num / safe)


def newell_f(x, y, z):
    """Newell's auxiliary function for the diagonal entries."""
    x, y, z = np.abs(x), np.abs(y), np.abs(z)
    x2, y2, z2 = x * x, y * y, z * z
    r = np.sqrt(x2 + y2 + z2)
    out = (y / 2.0) * (z2 - x2) * np.arcsinh(_ratio(y, np.sqrt(x2 + z2)))
    out += (z / 2.0) * (y2 - x2) * np.arcsinh(_ratio(z, np.sqrt(x2 + y2)))
    out -= x * y * z * np.arctan(_ratio(y * z, x * r))
    out += (2.0 * x2 - y2 - z2) * r / 6.0
    return out


def newell_g(x, y, z):
    """Newell's auxiliary function for the off-diagonal entries."""
    z = np.abs(z)
    x2, y2, z2 = x * x, y * y, z * z
    r = np.sqrt(x2 + y2 + z2)
    out = x * y * z * np.arcsinh(_ratio(z, np.sqrt(x2 + y2)))
    out += (y / 6.0) * (3.0 * z2 - y2) * np.arcsinh(_ratio(x, np.sqrt(y2 + z2)))
    out += (x / 6.0) * (3.0 * z2 - x2) * np.arcsinh(_ratio(y, np.sqrt(x2 + z2)))
    out -= (z2 * z / 6.0) * np.arctan(_ratio(x * y, z * r))
    out -= (z * y2 / 2.0) * np.arctan(_ratio(x * z, y * r))
    out -= (z * x2 / 2.0) * np.arctan(_ratio(y * z, x * r))
    out -= x * y * r / 3.0
    return out


_W = {-1: -1.0, 0: 2.0, 1: -1.0}


def _second_difference(func, x, y, z, dx, dy, dz):
    total = np.zeros(np.broadcast(x, y, z).shape)
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            for k in (-1, 0, 1):
                w = _W[i] * _W[j] * _W[k]
                total += w * func(x + i * dx, y + j * dy, z + k * dz)
    return total


def newell_tensor(x, y, z, dx, dy, dz) -> np.ndarray:
    """Demagnetizing tensor entries ``N_ab`` between two cells at offset ``(x, y, z)``.

    Returns an array of shape ``(6,) + broadcast shape`` ordered as
    :data:`COMPONENTS`. ``N(0)`` of a cube is ``diag(1/3, 1/3, 1/3)``.
    """
    x, y, z = (np.asarray(a, dtype=float) for a in (x, y, z))
    scale = 1.0 / (_FOUR_PI * dx * dy * dz)
    nxx = _second_difference(newell_f, x, y, z, dx, dy, dz)
    nyy = _second_difference(newell_f, y, z, x, dy, dz, dx)
    nzz = _second_difference(newell_f, z, x, y, dz, dx, dy)
    nxy = _second_difference(newell_g, x, y, z, dx, dy, dz)
    nxz = _second_difference(newell_g, x, z, y, dx, dz, dy)
    nyz = _second_difference(newell_g, y, z, x, dy, dz, dx)
    return scale * np.stack([nxx, nxy, nxz, nyy, nyz, nzz])


def dipole_tensor(x, y, z, volume=1.0) -> np.ndarray:
    """Point-dipole field tensor ``V (3 r r^T - I) / (4 pi |r|^3)`` in :data:`COMPONENTS` order."""
    r = np.sqrt(x * x + y * y + z * z)
    c = volume / (_FOUR_PI * r**5)
    return np.stack([c * (3 * x * x - r * r), c * 3 * x * y, c * 3 * x * z,
                     c * (3 * y * y - r * r), c * 3 * y * z, c * (3 * z * z - r * r)])


def _tent_rule(h: float, points: int):
    """Nodes/weights for the overlap density ``(1 - |u|/h) / h`` on ``[-h, h]``."""
    g, w = np.polynomial.legendre.leggauss(points)
    u = np.concatenate([(g - 1.0) * h / 2.0, (g + 1.0) * h / 2.0])
    wt = np.concatenate([w, w]) * 0.5 * (1.0 - np.abs(u) / h)
    return u, wt


def averaged_dipole_tensor(x, y, z, dx, dy, dz, points: int = 6) -> np.ndarray:
    """Cell-averaged ``N`` from Gauss quadrature of the dipole kernel.

    Averaging over source and target cells reduces to one integral over the
    offset ``u`` with a tent density per axis. Only valid for well separated
    cells; accuracy there is far better than Newell's closed form, which
    suffers cancellation in its 27-term second difference.
    """
    x, y, z = (np.asarray(a, dtype=float) for a in (x, y, z))
    ux, wx = _tent_rule(dx, points)
    uy, wy = _tent_rule(dy, points)
    uz, wz = _tent_rule(dz, points)
    total = np.zeros((6,) + np.broadcast(x, y, z).shape)
    for a, wa in zip(ux, wx):
        for b, wb in zip(uy, wy):
            for c, wc in zip(uz, wz):
                total += (wa * wb * wc) * dipole_tensor(x + a, y + b, z + c, dx * dy * dz)
    return -total


# offsets beyond this many (largest) cell sizes use the quadrature branch;
# the order drops with distance, keeping relative error below ~1e-11
FAR_FIELD_RATIO = 10.0
_QUADRATURE_TIERS = ((40.0, 3), (20.0, 4), (FAR_FIELD_RATIO, 6))


def cell_tensor(x, y, z, dx, dy, dz) -> np.ndarray:
    """``N_ab`` at offset ``(x, y, z)``: Newell near, quadrature far."""
    x, y, z = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, y, z)))
    h = max(dx, dy, dz)
    dist = np.sqrt(x * x + y * y + z * z) / h
    out = np.empty((6,) + x.shape)
    done = np.zeros(x.shape, dtype=bool)
    for lower, points in _QUADRATURE_TIERS:
        sel = (dist >= lower) & ~done
        if sel.any():
            out[:, sel] = averaged_dipole_tensor(x[sel], y[sel], z[sel], dx, dy, dz, points)
            done |= sel
    near = ~done
    if near.any():
        out[:, near] = newell_tensor(x[near], y[near], z[near], dx, dy, dz)
    return out


def _padded_length(n: int) -> int:
    return 1 if n == 1 else 2 * n


def _offsets(n: int, d: float) -> np.ndarray:
    """Signed offsets for the wrap-around layout of a padded axis."""
    p = _padded_length(n)
    idx = np.arange(p)
    off = np.where(idx < n, idx, idx - p).astype(float)
    if p > 1:
        off[n] = 0.0  # slot never reached by an in-domain pair
    return off * d


class DemagTensor:
    """Field kernel ``K = -N`` on the zero-padded grid plus its transforms.

    ``kernel`` has shape ``(6, Pz, Py, Px)`` with ``P = 2n`` (``1`` for a
    single-cell axis, where no padding is needed).
    """

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        ox = _offsets(mesh.nx, mesh.dx)
        oy = _offsets(mesh.ny, mesh.dy)
        oz = _offsets(mesh.nz, mesh.dz)
        z, y, x = np.meshgrid(oz, oy, ox, indexing="ij")
        kern = -cell_tensor(x, y, z, mesh.dx, mesh.dy, mesh.dz)
        for axis, n in zip((3, 2, 1), mesh.counts):
            if n > 1:
                sl = [slice(None)] * 4
                sl[axis] = n
                kern[tuple(sl)] = 0.0
        kern.flags.writeable = False
        self.kernel = kern
        self.padded_shape = kern.shape[1:]
        # length-1 axes need no transform
        self._axes = tuple(a for a in (1, 2, 3) if kern.shape[a] > 1)
        self.kernel_hat = self._forward(kern)

    def entry(self, a: int, b: int) -> np.ndarray:
        i = _PAIR_INDEX[(min(a, b), max(a, b))]
        return self.kernel[i]

    def self_term(self) -> np.ndarray:
        """3x3 kernel block at zero offset."""
        k = self.kernel[:, 0, 0, 0]
        return np.array([[k[0], k[1], k[2]], [k[1], k[3], k[4]], [k[2], k[4], k[5]]])

    def _forward(self, a):
        if not self._axes:
            return a.astype(complex)
        return scipy.fft.rfftn(a, axes=self._axes)

    def _inverse(self, a):
        if not self._axes:
            return a.real.copy()
        shape = [self.padded_shape[ax - 1] for ax in self._axes]
        return scipy.fft.irfftn(a, s=shape, axes=self._axes)

    def apply(self, m: np.ndarray) -> np.ndarray:
        """Convolve a raw ``(3, nz, ny, nx)`` array; returns the same shape."""
        nz, ny, nx = self.mesh.shape
        pad = np.zeros((3,) + self.padded_shape)
        pad[:, :nz, :ny, :nx] = m
        mh = self._forward(pad)
        kh = self.kernel_hat
        hh = np.empty_like(mh)
        hh[0] = kh[0] * mh[0] + kh[1] * mh[1] + kh[2] * mh[2]
        hh[1] = kh[1] * mh[0] + kh[3] * mh[1] + kh[4] * mh[2]
        hh[2] = kh[2] * mh[0] + kh[4] * mh[1] + kh[5] * mh[2]
        h = self._inverse(hh)
        return h[:, :nz, :ny, :nx]


def build_demag_tensor(mesh: Mesh) -> DemagTensor:
    return DemagTensor(mesh)


def stray_field(tensor: DemagTensor, m: VectorField, stats=None) -> VectorField:
    """``h_s = K * m``; one call is one counted FFT execution."""
    check_same_mesh(tensor, m)
    if stats is not None:
        stats.add_fft(1)
    return VectorField(m.mesh, tensor.apply(m.data), copy=False)


def stray_field_direct(mesh: Mesh, m: np.ndarray) -> np.ndarray:
    """O(n^2) direct summation with kernel entries evaluated pair by pair."""
    k, j, i = (a.ravel() for a in np.indices(mesh.shape))
    mm = np.asarray(m, dtype=float).reshape(3, -1)
    n = mesh.n_cells
    h = np.zeros((3, n))
    for p in range(n):
        nt = -cell_tensor((i[p] - i) * mesh.dx, (j[p] - j) * mesh.dy, (k[p] - k) * mesh.dz,
                          mesh.dx, mesh.dy, mesh.dz)
        kxx, kxy, kxz, kyy, kyz, kzz = nt
        h[0, p] = np.sum(kxx * mm[0] + kxy * mm[1] + kxz * mm[2])
        h[1, p] = np.sum(kxy * mm[0] + kyy * mm[1] + kyz * mm[2])
        h[2, p] = np.sum(kxz * mm[0] + kyz * mm[1] + kzz * mm[2])
    return h.reshape((3,) + mesh.shape)
