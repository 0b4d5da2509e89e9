import numpy as np
import pytest

from llgspm.experiments.convergence import run_manufactured
from llgspm.experiments.manufactured import CASE_1D, CASE_3D, CASES, cross
from llgspm.mesh import Mesh


def _samples(case, seed, n=20):
    rng = np.random.default_rng(seed)
    lx, ly, lz = case.lengths
    x = rng.uniform(0.01, lx - 0.01, n)
    y = rng.uniform(0.01, ly - 0.01, n)
    z = rng.uniform(0.01, lz - 0.01, n)
    t = rng.uniform(0.0, 1.0, n)
    return x, y, z, t


@pytest.mark.parametrize("name", ["1d", "3d"])
def test_forcing_makes_exact_solution_satisfy_the_pde(name):
    case = CASES[name]
    x, y, z, t = _samples(case, 7)
    worst = max(float(np.max(np.abs(case.residual(x[i:i + 1], y[i:i + 1], z[i:i + 1], t[i]))))
                for i in range(x.size))
    assert worst <= 1e-10


@pytest.mark.parametrize("name", ["1d", "3d"])
def test_exact_solution_is_unit_and_forcing_is_tangent(name):
    case = CASES[name]
    x, y, z, t = _samples(case, 8)
    m = case.exact(x, y, z, t[0])
    f = case.forcing(x, y, z, t[0])
    np.testing.assert_allclose(np.sum(m * m, axis=0), 1.0, atol=1e-15)
    np.testing.assert_allclose(np.sum(m * f, axis=0), 0.0, atol=1e-12)


def test_exact_solution_is_neumann_compatible_in_1d():
    eps = 1e-6
    for t in (0.0, 0.3):
        for x0, sgn in ((0.0, 1.0), (1.0, -1.0)):
            a = CASE_1D.exact(np.array([x0]), 0.0, 0.0, t)
            b = CASE_1D.exact(np.array([x0 + sgn * eps]), 0.0, 0.0, t)
            assert np.max(np.abs(a - b)) / eps < 1e-5


@pytest.mark.parametrize("case", [CASE_1D, CASE_3D], ids=["1d", "3d"])
def test_field_form_reproduces_additive_forcing(case):
    # -m x F - alpha m x (m x F) == f for the field-form F
    x, y, z, t = _samples(case, 9)
    m = case.exact(x, y, z, t[1])
    f = case.forcing(x, y, z, t[1])
    F = case.field_forcing(x, y, z, t[1])
    mxF = cross(m, F)
    np.testing.assert_allclose(-mxF - case.alpha * cross(m, mxF), f, atol=1e-12)


def test_bound_forcing_matches_pointwise_forcing():
    mesh = Mesh.from_box(CASE_3D.lengths, (6, 4, 2))
    x, y, z = mesh.cell_centers()
    bound = CASE_3D.bound_forcing(mesh)
    np.testing.assert_array_equal(bound(x, y, z, 0.4), CASE_3D.forcing(x, y, z, 0.4))


@pytest.mark.parametrize("mode", ["source", "field"])
@pytest.mark.parametrize("kind", ["gspm", "a", "b"])
def test_both_forcing_routes_converge_in_time(mode, kind):
    T = 1e-2
    errs = [run_manufactured(CASE_1D, kind, (40,), T / k, T, mode=mode)[0] for k in (20, 40, 80)]
    assert errs[0] > errs[1] > errs[2]


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        CASE_1D.context(Mesh(4), "both")
