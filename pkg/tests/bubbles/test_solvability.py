import math

import numpy as np
import pytest
from scipy import integrate

from app.core.exceptions import DimensionTooLow, SymmetryViolation
from app.services.bubbles.bubble import bubble_constant
from app.services.bubbles.curvature_data import (
    CurvatureData,
    constant_curvature,
    flat,
    from_riemann,
    kulkarni_nomizu,
    product_of_spheres,
    random_algebraic,
    symmetry_defects,
)
from app.services.bubbles.solvability import (
    conformal_coefficient,
    rhs_kernel_orthogonality,
    solvability_nu,
    solvability_report,
)


def _round_sphere_nu(dim):
    """
    Unit S^N in normal coordinates: the right-hand side collapses to
    (N-1) r U' + N(N-2)/4 U, paired with psi^0 = r U' + (N-2)/2 U.
    """
    alpha = bubble_constant(dim)

    def u(r):
        return alpha * (1 + r * r) ** (-(dim - 2) / 2)

    def r_du(r):
        return -alpha * (dim - 2) * r * r * (1 + r * r) ** (-dim / 2)

    def psi0(r):
        return r_du(r) + 0.5 * (dim - 2) * u(r)

    def rhs(r):
        return (dim - 1) * r_du(r) + 0.25 * dim * (dim - 2) * u(r)

    projection, _ = integrate.quad(lambda r: r ** (dim - 1) * rhs(r) * psi0(r), 0, math.inf, epsabs=0, epsrel=1e-12, limit=200)
    norm_sq, _ = integrate.quad(lambda r: r ** (dim - 1) * psi0(r) ** 2, 0, math.inf, epsabs=0, epsrel=1e-12, limit=200)
    return -projection / norm_sq


def test_round_sphere_nu_matches_radial_oracle():
    assert solvability_nu(constant_curvature(7)) == pytest.approx(_round_sphere_nu(7), rel=1e-8)


def test_flat_data_gives_zero_nu():
    assert solvability_nu(flat(7)) == 0.0


def test_nu_is_linear_in_the_curvature():
    data = random_algebraic(7, seed=4)

    assert solvability_nu(data.scaled(2.5)) == pytest.approx(2.5 * solvability_nu(data), rel=1e-9)


def test_report_rechecks_the_fredholm_condition():
    report = solvability_report(product_of_spheres([2, 5]))

    assert report.passed
    assert abs(report.fredholm_residual) <= report.fredholm_bound
    assert report.psi0_norm_sq > 0.0


@pytest.mark.parametrize(
    "data",
    [flat(7), random_algebraic(7, seed=0), product_of_spheres([2, 5])],
    ids=["flat", "random", "s2_x_s5"],
)
def test_rhs_is_orthogonal_to_translations(data):
    assert np.max(np.abs(rhs_kernel_orthogonality(data))) <= 1e-9


def test_low_dimension_is_rejected():
    with pytest.raises(DimensionTooLow):
        solvability_nu(constant_curvature(4))


def test_conformal_coefficient():
    assert conformal_coefficient(7) == pytest.approx(5.0 / 24.0)


def test_constant_curvature_sectional_convention():
    data = constant_curvature(5, curvature=2.0)

    assert data.riemann[0, 1, 0, 1] == pytest.approx(2.0)
    assert data.riemann[0, 1, 1, 0] == pytest.approx(-2.0)
    assert data.scalar_curv == pytest.approx(2.0 * 5 * 4)


def test_product_of_spheres_scalar_curvature():
    data = product_of_spheres([2, 5], radii=[1.0, 2.0])

    assert data.scalar_curv == pytest.approx(2.0 + 20.0 / 4.0)
    assert data.riemann[0, 2, 0, 2] == 0.0


def test_symmetry_violation_is_detected():
    rng = np.random.default_rng(0)
    raw = rng.standard_normal((5,) * 4)

    assert max(symmetry_defects(raw).values()) > 1e-3
    with pytest.raises(SymmetryViolation):
        CurvatureData(dim=5, riemann=raw, christoffel_derivs=np.zeros((5,) * 3), scalar_curv=0.0)


def test_projection_repairs_small_asymmetry():
    identity = np.eye(5)
    riemann = 0.5 * kulkarni_nomizu(identity, identity)
    noisy = riemann + 1e-6 * np.random.default_rng(1).standard_normal(riemann.shape)

    data = from_riemann(noisy, project=True)

    assert max(symmetry_defects(data.riemann).values()) <= 1e-12
    assert np.allclose(data.riemann, riemann, atol=1e-5)


def test_json_form_is_flattened_row_major():
    data = product_of_spheres([2, 5])

    dumped = data.model_dump()
    restored = CurvatureData(**dumped)

    assert len(dumped["riemann"]) == 7 ** 4
    assert len(dumped["christoffel_derivs"]) == 7 ** 3
    assert np.array_equal(restored.riemann, data.riemann)
