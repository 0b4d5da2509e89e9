import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from llgspm.errors import MeshMismatch, ZeroVector
from llgspm.mesh import (MaterialParams, Mesh, VectorField, average_magnetization, check_same_mesh,
                         in_plane_angle_map, normalize_array, project_onto_sphere)


def test_mesh_geometry():
    m = Mesh(4, 2, 1, 0.25, 0.5, 0.2, origin=(1.0, 0.0, -1.0))
    assert m.shape == (1, 2, 4)
    assert m.n_cells == 8
    assert m.lengths == (1.0, 1.0, 0.2)
    x, y, z = m.cell_centers()
    assert x.shape == m.shape
    np.testing.assert_allclose(x[0, 0], [1.125, 1.375, 1.625, 1.875])
    np.testing.assert_allclose(y[0, :, 0], [0.25, 0.75])
    assert z[0, 0, 0] == pytest.approx(-0.9)


def test_from_box():
    m = Mesh.from_box((2.0, 1.0, 0.2), (32, 16, 4))
    assert m.spacing == pytest.approx((1 / 16, 1 / 16, 0.05))


@pytest.mark.parametrize("kw", [dict(nx=0), dict(nx=2, dx=0.0), dict(nx=2, dy=-1.0),
                                dict(nx=2, dz=float("inf")), dict(nx=2.5)])
def test_mesh_rejects_bad_input(kw):
    with pytest.raises(ValueError):
        Mesh(**kw)


def test_vector_field_is_read_only_and_checked():
    mesh = Mesh(3)
    f = VectorField(mesh, np.ones((3, 1, 1, 3)))
    with pytest.raises(ValueError):
        f.data[0, 0, 0, 0] = 2.0
    with pytest.raises(ValueError):
        VectorField(mesh, np.ones((3, 1, 1, 4)))
    with pytest.raises(ValueError):
        VectorField(mesh, np.full((3, 1, 1, 3), np.nan))


def test_cells_order_is_x_fastest():
    mesh = Mesh(2, 2, 1)
    data = np.arange(12.0).reshape(3, 1, 2, 2)
    f = VectorField(mesh, data)
    np.testing.assert_array_equal(f.cells()[1], [1.0, 5.0, 9.0])
    np.testing.assert_array_equal(VectorField.from_cells(mesh, f.cells()).data, data)


def test_normalize_zero_vector_reports_cell():
    v = np.ones((3, 1, 2, 3))
    v[:, 0, 1, 2] = 0.0
    with pytest.raises(ZeroVector) as exc:
        normalize_array(v)
    assert exc.value.index == (2, 1, 0)


def test_mesh_mismatch():
    with pytest.raises(MeshMismatch):
        check_same_mesh(Mesh(3), Mesh(4))


vectors = arrays(np.float64, (3, 1, 2, 3), elements=st.floats(-10, 10, allow_nan=False))


@given(vectors)
def test_projection_gives_unit_norm_and_is_idempotent(v):
    if np.min(np.sqrt(np.sum(v * v, axis=0))) < 1e-6:
        return
    f = project_onto_sphere(VectorField(Mesh(3, 2), v))
    assert f.unit
    assert np.max(np.abs(f.norms() - 1.0)) <= 2e-16 * 4
    again = project_onto_sphere(f)
    np.testing.assert_allclose(again.data, f.data, rtol=0, atol=1e-15)


@given(vectors)
def test_average_of_unit_field_lies_in_ball(v):
    if np.min(np.sqrt(np.sum(v * v, axis=0))) < 1e-6:
        return
    f = project_onto_sphere(VectorField(Mesh(3, 2), v))
    assert np.linalg.norm(average_magnetization(f)) <= 1.0 + 1e-15


def test_in_plane_angle_map():
    mesh = Mesh(4)
    data = np.array([[1.0, -1.0, 0.0, 0.0], [0.0, -0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]])
    ang, deg = in_plane_angle_map(VectorField(mesh, data.reshape(3, 1, 1, 4)))
    np.testing.assert_allclose(ang.ravel(), [0.0, math.pi, math.pi / 2, 0.0])
    np.testing.assert_array_equal(deg.ravel(), [False, False, False, True])
    assert np.all(ang > -math.pi) and np.all(ang <= math.pi)


def test_material_groups():
    mat = MaterialParams()
    tu = 1.0 / (mat.mu0 * mat.gamma * mat.Ms)
    assert mat.time_unit == pytest.approx(tu, rel=1e-15)
    assert mat.to_dimensionless_time(1e-12) == pytest.approx(1e-12 / tu, rel=1e-15)
    assert mat.to_seconds(mat.to_dimensionless_time(3e-9)) == pytest.approx(3e-9)
    assert mat.Q == pytest.approx(mat.Ku / (mat.mu0 * mat.Ms**2))
    assert mat.eps == pytest.approx((mat.exchange_length / mat.L) ** 2)
    assert mat.field_to_tesla(mat.field_from_tesla(0.009)) == pytest.approx(0.009)


def test_material_rejects_nonphysical():
    with pytest.raises(ValueError):
        MaterialParams(Ms=-1.0)
    with pytest.raises(ValueError):
        MaterialParams(alpha=-0.1)
