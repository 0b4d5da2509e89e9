import numpy as np
import pytest

from llgspm.demag import (DemagTensor, averaged_dipole_tensor, cell_tensor, dipole_tensor,
                          newell_tensor, stray_field, stray_field_direct)
from llgspm.mesh import Mesh, VectorField
from llgspm.schemes import SolveStats


def _direct(mesh, m):
    """Pairwise sum written independently of the package's direct path."""
    nz, ny, nx = mesh.shape
    h = np.zeros_like(m)
    cells = [(i, j, k) for k in range(nz) for j in range(ny) for i in range(nx)]
    for (i, j, k) in cells:
        acc = np.zeros(3)
        for (a, b, c) in cells:
            t = cell_tensor(np.array((i - a) * mesh.dx), np.array((j - b) * mesh.dy),
                            np.array((k - c) * mesh.dz), mesh.dx, mesh.dy, mesh.dz)
            xx, xy, xz, yy, yz, zz = (float(v) for v in t)
            n = np.array([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])
            acc -= n @ m[:, c, b, a]
        h[:, k, j, i] = acc
    return h


@pytest.mark.parametrize("mesh", [Mesh(8, 8, 4, 0.1, 0.1, 0.05), Mesh(5, 1, 1, 0.3, 0.1, 0.1),
                                  Mesh(6, 4, 1, 0.2, 0.15, 0.02), Mesh(1, 1, 1, 0.2, 0.3, 0.4)],
                         ids=str)
def test_fft_matches_direct_summation(mesh):
    m = np.random.default_rng(5).normal(size=(3,) + mesh.shape)
    fast = DemagTensor(mesh).apply(m)
    ref = stray_field_direct(mesh, m)
    assert np.max(np.abs(fast - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_package_direct_path_matches_independent_sum():
    mesh = Mesh(3, 2, 2, 0.2, 0.3, 0.1)
    m = np.random.default_rng(6).normal(size=(3,) + mesh.shape)
    np.testing.assert_allclose(stray_field_direct(mesh, m), _direct(mesh, m), rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("d", [(1.0, 1.0, 1.0), (0.3, 0.7, 0.2), (1.0, 1.0, 0.01)])
def test_self_demag_trace_is_one(d):
    n = newell_tensor(np.array(0.0), np.array(0.0), np.array(0.0), *d)
    assert float(n[0] + n[3] + n[5]) == pytest.approx(1.0, abs=1e-12)


def test_cube_self_factors():
    n = newell_tensor(np.array(0.0), np.array(0.0), np.array(0.0), 1.0, 1.0, 1.0)
    np.testing.assert_allclose([n[0], n[3], n[5]], 1 / 3, atol=1e-13)
    np.testing.assert_allclose([n[1], n[2], n[4]], 0.0, atol=1e-14)
    h = DemagTensor(Mesh(1)).apply(np.array([0.0, 0.6, 0.8]).reshape(3, 1, 1, 1))
    np.testing.assert_allclose(h.ravel(), [0.0, -0.2, -0.8 / 3], atol=1e-13)


def test_thin_film_is_mostly_out_of_plane():
    mesh = Mesh(16, 16, 1, 1 / 16, 1 / 16, 0.01)
    t = DemagTensor(mesh)
    up = t.apply(np.broadcast_to(np.array([0, 0, 1.0])[:, None, None, None], (3,) + mesh.shape))
    side = t.apply(np.broadcast_to(np.array([1.0, 0, 0])[:, None, None, None], (3,) + mesh.shape))
    assert np.mean(up[2]) < -0.9
    assert -0.05 < np.mean(side[0]) < 0


def test_far_field_tends_to_point_dipole():
    # dipole_tensor is the field kernel, i.e. -N
    d = (0.1, 0.2, 0.15)
    vol = d[0] * d[1] * d[2]
    gaps = []
    for r in (1.0, 2.0, 4.0):
        x, y, z = (np.array(v) for v in (r, 0.7 * r, -0.4 * r))
        n = newell_tensor(x, y, z, *d)
        gaps.append(np.max(np.abs(n + dipole_tensor(x, y, z, vol))) / np.max(np.abs(n)))
    assert gaps[-1] < 1e-3
    # leading correction is quadrupolar: O((d/r)^2)
    assert gaps[0] / gaps[1] == pytest.approx(4.0, rel=0.1)


def test_closed_form_and_quadrature_agree_at_moderate_distance():
    d = (0.1, 0.2, 0.15)
    x, y, z = (np.array(v) for v in (1.0, 0.7, -0.4))
    n = newell_tensor(x, y, z, *d)
    q = averaged_dipole_tensor(x, y, z, *d, points=12)
    assert np.max(np.abs(n - q)) <= 1e-9 * np.max(np.abs(n))


def test_far_tiers_match_high_order_quadrature():
    d = (0.1, 0.1, 0.1)
    rs = np.linspace(1.0, 6.0, 60)
    x, y, z = rs, 0.3 * rs, 0.1 * rs
    tiers = cell_tensor(x, y, z, *d)
    ref = averaged_dipole_tensor(x, y, z, *d, points=14)
    rel = np.max(np.abs(tiers - ref), axis=0) / np.max(np.abs(ref), axis=0)
    assert np.max(rel) <= 1e-10


def test_kernel_is_symmetric_in_offset():
    mesh = Mesh(5, 3, 2, 0.2, 0.1, 0.3)
    k = DemagTensor(mesh).kernel
    # xx is even in every offset; xy is odd in x and y
    assert k[0, 0, 0, 1] == pytest.approx(k[0, 0, 0, -1], rel=1e-13)
    assert k[1, 0, 1, 1] == pytest.approx(-k[1, 0, 1, -1], rel=1e-12)


def test_stray_field_counts_one_fft():
    mesh = Mesh(4, 4, 1)
    stats = SolveStats()
    stats.begin_step()
    stray_field(DemagTensor(mesh), VectorField.uniform(mesh, [1, 0, 0]), stats)
    assert stats._ffts == 1
