# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pointwise kernels; same signatures as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

from .errors import ZeroVector
from .mesh import ZERO_NORM

cnp.import_array()


cdef inline cnp.ndarray _flat(x, shape):
    if type(x) is np.ndarray and x.dtype == np.float64 and x.shape == shape and x.flags.c_contiguous:
        return x.reshape(-1)
    return np.ascontiguousarray(np.broadcast_to(x, shape), dtype=np.float64).reshape(-1)


def gs_row(int i, a1, a2, a3, b1, b2, b3, double alpha, bint norm_weight):
    shape = np.shape(a1)
    for x in (a2, a3, b1, b2, b3):
        if np.shape(x) != shape:
            shape = np.broadcast_shapes(shape, np.shape(x))
    cdef const double[::1] x1 = _flat(a1, shape)
    cdef const double[::1] x2 = _flat(a2, shape)
    cdef const double[::1] x3 = _flat(a3, shape)
    cdef const double[::1] y1 = _flat(b1, shape)
    cdef const double[::1] y2 = _flat(b2, shape)
    cdef const double[::1] y3 = _flat(b3, shape)
    cdef Py_ssize_t n = x1.shape[0], p
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double ai, aj, ak, bi, bj, bk, dot, w
    if i < 0 or i > 2:
        raise ValueError("component index must be 0, 1 or 2")
    for p in range(n):
        if i == 0:
            ai = x1[p]; aj = x2[p]; ak = x3[p]; bi = y1[p]; bj = y2[p]; bk = y3[p]
        elif i == 1:
            ai = x2[p]; aj = x3[p]; ak = x1[p]; bi = y2[p]; bj = y3[p]; bk = y1[p]
        else:
            ai = x3[p]; aj = x1[p]; ak = x2[p]; bi = y3[p]; bj = y1[p]; bk = y2[p]
        o[p] = ai - (aj * bk - ak * bj)
        if alpha != 0.0:
            dot = ai * bi + aj * bj + ak * bk
            w = ai * ai + aj * aj + ak * ak if norm_weight else 1.0
            o[p] = o[p] - alpha * dot * ai + alpha * w * bi
    return out.reshape(shape)


def normalize(v):
    arr = np.ascontiguousarray(v, dtype=np.float64)
    shape = arr.shape
    cdef Py_ssize_t n = arr.size // 3, p
    cdef const double[:, ::1] src = arr.reshape(3, n)
    out = np.empty((3, n))
    cdef double[:, ::1] dst = out
    cdef double r, zero = ZERO_NORM
    for p in range(n):
        r = sqrt(src[0, p] * src[0, p] + src[1, p] * src[1, p] + src[2, p] * src[2, p])
        if r < zero:
            k, j, i = np.unravel_index(p, shape[1:])
            raise ZeroVector((i, j, k))
        dst[0, p] = src[0, p] / r
        dst[1, p] = src[1, p] / r
        dst[2, p] = src[2, p] / r
    return out.reshape(shape)


def laplacian(u, double dx, double dy, double dz):
    cdef const double[:, :, ::1] a = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t nz = a.shape[0], ny = a.shape[1], nx = a.shape[2]
    out = np.zeros((nz, ny, nx))
    cdef double[:, :, ::1] o = out
    cdef double cx = 1.0 / (dx * dx), cy = 1.0 / (dy * dy), cz = 1.0 / (dz * dz)
    cdef Py_ssize_t i, j, k, lo, hi
    cdef double c, s
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                c = a[k, j, i]
                s = 0.0
                if nx > 1:
                    lo = i - 1 if i > 0 else 0
                    hi = i + 1 if i < nx - 1 else nx - 1
                    s += (a[k, j, lo] - 2.0 * c + a[k, j, hi]) * cx
                if ny > 1:
                    lo = j - 1 if j > 0 else 0
                    hi = j + 1 if j < ny - 1 else ny - 1
                    s += (a[k, lo, i] - 2.0 * c + a[k, hi, i]) * cy
                if nz > 1:
                    lo = k - 1 if k > 0 else 0
                    hi = k + 1 if k < nz - 1 else nz - 1
                    s += (a[lo, j, i] - 2.0 * c + a[hi, j, i]) * cz
                o[k, j, i] = s
    return out
