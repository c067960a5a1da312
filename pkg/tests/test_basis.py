import math

import numpy as np
import pytest

from oracles import all_families, gradient_error, laplacian_error, sample_points
from reskit.basis import (
    Kernel, eval_basis, harmonic_basis, kernel_basis, mfs_basis, poly_basis_1d,
    require_smoothness,
)
from reskit.errors import InvalidArgument, InvalidConfiguration, SingularEvaluation
from reskit.geometry import PointSet, Tag, UnitDisk, chebyshev_nodes, fictitious_boundary


@pytest.mark.parametrize("name", list(all_families()))
def test_derivatives_match_finite_differences(name):
    space = all_families()[name]
    p = sample_points()
    assert gradient_error(space, p) < 1e-5
    assert laplacian_error(space, p) < 1e-4


def test_poly1d_values():
    b = poly_basis_1d(1)
    assert np.array_equal(b.value(np.linspace(-1, 1, 7)), np.ones((7, 1)))
    assert poly_basis_1d(3).value(np.array([0.5]))[0, 2] == pytest.approx(-0.5, abs=1e-15)
    V = poly_basis_1d(11).value(np.linspace(-1, 1, 1000))
    assert np.abs(V).max() <= 1 + 1e-14


def test_poly1d_square_matrix_invertible():
    V = eval_basis(poly_basis_1d(3), chebyshev_nodes(3))
    assert abs(np.linalg.det(V)) > 1e-10


def test_harmonic_values():
    v = harmonic_basis(2).value(np.array([[1.0, 1.0]]))[0]
    assert np.allclose(v, [1, 1, 1, 0, 2], atol=1e-15)
    assert harmonic_basis(2).dim == 5
    assert np.array_equal(eval_basis(harmonic_basis(1), np.zeros((1, 2))), [[1.0, 0.0, 0.0]])


def test_harmonic_laplacian_exactly_zero(rng):
    p = rng.uniform(-1, 1, (20, 2))
    assert np.all(harmonic_basis(7).laplacian(p) == 0)
    assert np.all(eval_basis(harmonic_basis(3), p, "laplacian") == 0)


def test_harmonic_gradient_closed_form():
    a, b = 0.3, -0.7
    g = harmonic_basis(2).gradient(np.array([[a, b]]))[0, 3]
    assert np.allclose(g, [2 * a, -2 * b], atol=1e-15)


def test_mfs_values():
    charges = PointSet(np.array([[2.0, 0.0]]), Tag.FICTITIOUS)
    b = mfs_basis(charges)
    assert b.value(np.array([[1.0, 0.0]]))[0, 0] == 0.0
    assert b.value(np.array([[0.0, 0.0]]))[0, 0] == pytest.approx(-math.log(2) / (2 * math.pi), abs=1e-15)
    assert b.value(np.array([[0.0, 0.0]]))[0, 0] == pytest.approx(-0.110318, abs=1e-6)


def test_mfs_laplacian_vanishes(disk=UnitDisk()):
    b = mfs_basis(fictitious_boundary(disk, 1.5, 24), disk)
    assert np.abs(b.laplacian(sample_points())).max() < 1e-10


def test_mfs_singular_evaluation():
    charges = PointSet(np.array([[2.0, 0.0]]), Tag.FICTITIOUS)
    with pytest.raises(SingularEvaluation):
        eval_basis(mfs_basis(charges), np.array([[2.0, 0.0]]))


def test_mfs_charges_inside_rejected():
    disk = UnitDisk()
    with pytest.raises(InvalidArgument):
        mfs_basis(PointSet(np.array([[0.5, 0.0]]), Tag.FICTITIOUS), disk)
    with pytest.raises(InvalidArgument):
        mfs_basis(PointSet(np.array([[1.0, 0.0]]), Tag.FICTITIOUS), disk)


def test_kernel_closed_forms():
    k = Kernel("matern52", 1.0)
    assert k.phi(np.array(0.0)) == 1.0
    s5 = math.sqrt(5)
    assert k.phi(np.array(1.0)) == pytest.approx((1 + s5 + 5 / 3) * math.exp(-s5), abs=1e-14)
    assert k.phi(np.array(1.0)) == pytest.approx(0.523994, abs=1e-6)
    assert k.phi(np.array(0.0)) - k.lap(np.array(0.0)) == pytest.approx(13 / 3, abs=1e-12)
    for fam in ("matern52", "matern72", "gaussian"):
        assert Kernel(fam, 2.5).phi(np.array(0.0)) == pytest.approx(1.0, abs=1e-15)


def test_kernel_id_minus_laplace_at_center_by_fd():
    # finite-difference oracle for 13/3, independent of the symbolic profiles
    b = kernel_basis(np.zeros((1, 2)), Kernel("matern52", 1.0))
    h = 1e-4
    p0 = np.zeros((1, 2))
    v = lambda d: b.value(p0 + d)[0, 0]
    lap = (v([h, 0]) + v([-h, 0]) + v([0, h]) + v([0, -h]) - 4 * v([0, 0])) / h**2
    assert v([0, 0]) - lap == pytest.approx(13 / 3, abs=1e-6)


@pytest.mark.parametrize("fam", ["matern52", "matern72", "gaussian"])
def test_kernel_matrix_positive_definite(fam, rng):
    c = rng.uniform(-1, 1, (40, 2))
    A = kernel_basis(c, Kernel(fam, 2.0)).value(c)
    assert np.allclose(A, A.T, atol=1e-14)
    assert np.linalg.eigvalsh(A).min() > 0


def test_kernel_shape_validated():
    with pytest.raises(InvalidArgument):
        Kernel("matern52", 0.0)
    with pytest.raises(ValueError):
        Kernel("bessel", 1.0)


def test_require_smoothness():
    require_smoothness(Kernel("matern72", 1.0), 4, "test")
    require_smoothness(Kernel("gaussian", 1.0), 4, "test")
    with pytest.raises(InvalidConfiguration):
        require_smoothness(Kernel("matern52", 1.0), 4, "test")


def test_dimensions():
    for name, space in all_families().items():
        assert space.value(sample_points(5)).shape == (5, space.dim), name


def test_eval_basis_unknown():
    with pytest.raises(InvalidArgument):
        eval_basis(harmonic_basis(1), np.zeros((1, 2)), "hessian")
