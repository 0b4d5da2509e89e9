"""Pure numpy implementations of the pointwise kernels.

Used when the compiled extension is unavailable, and as its reference.
"""

import numpy as np

from .errors import ZeroVector
from .mesh import ZERO_NORM

_NEXT = {0: (1, 2), 1: (2, 0), 2: (0, 1)}


def gs_row(i, a1, a2, a3, b1, b2, b3, alpha, norm_weight):
    """Gauss-Seidel row update for component ``i`` (0-based).

    ``a`` are the magnetization components and ``b`` the matching heat-solve
    outputs at whatever stage the caller has reached. With ``(i, j, k)``
    cyclic the result is

        a_i - (a_j b_k - a_k b_j) - alpha (a . b) a_i + alpha w b_i

    where ``w = |a|^2`` if ``norm_weight`` else 1.
    """
    a = (a1, a2, a3)
    b = (b1, b2, b3)
    j, k = _NEXT[i]
    out = a[i] - (a[j] * b[k] - a[k] * b[j])
    if alpha != 0.0:
        dot = a1 * b1 + a2 * b2 + a3 * b3
        w = a1 * a1 + a2 * a2 + a3 * a3 if norm_weight else 1.0
        out = out - alpha * dot * a[i] + alpha * w * b[i]
    return out


def normalize(v):
    """Return ``v / |v|`` per cell for a ``(3, ...)`` array."""
    norm = np.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    bad = norm < ZERO_NORM
    if bad.any():
        k, j, i = np.unravel_index(np.flatnonzero(bad)[0], norm.shape)
        raise ZeroVector((i, j, k))
    return v / norm


def laplacian(u, dx, dy, dz):
    """Clamped-neighbor 7-point Laplacian of a ``(nz, ny, nx)`` array."""
    out = np.zeros_like(u)
    for axis, d in ((2, dx), (1, dy), (0, dz)):
        n = u.shape[axis]
        if n == 1:
            continue
        idx = np.arange(n)
        lo = np.take(u, np.maximum(idx - 1, 0), axis=axis)
        hi = np.take(u, np.minimum(idx + 1, n - 1), axis=axis)
        out += (lo - 2.0 * u + hi) / (d * d)
    return out
