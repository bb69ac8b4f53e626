import math
from fractions import Fraction

import numpy as np
import pytest

from app.core.exceptions import DimensionTooLow
from app.services.bubbles.bubble import (
    Bubble,
    KernelElement,
    bubble_constant,
    bubble_eval,
    bubble_profile,
    critical_equation_residual,
    critical_exponent,
    kernel_elements,
    kernel_eval,
    kernel_profile,
    linearized_residual,
    profile_residual,
    v_decay_envelope,
)


def test_critical_exponent_is_exact():
    assert critical_exponent(7) == Fraction(9, 5)
    assert critical_exponent(10) == Fraction(3, 2)


def test_bubble_value_at_origin():
    value = bubble_eval(Bubble(dim=7), np.zeros(7))

    assert value == pytest.approx(35.0 ** 1.25, rel=1e-14)
    assert bubble_constant(7) == pytest.approx(35.0 ** 1.25, rel=1e-14)


def test_bubble_scaling():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(7)
    mu = 0.37

    scaled = bubble_eval(Bubble(dim=7, mu=mu), x)
    unit = bubble_eval(Bubble(dim=7), x / mu)

    assert scaled == pytest.approx(mu ** -2.5 * unit, rel=1e-13)


def test_bubble_center_must_match_dimension():
    with pytest.raises(ValueError):
        Bubble(dim=7, center=[0.0, 0.0])


def test_bubble_solves_critical_equation():
    x = np.zeros(7)
    x[0] = 1.0

    residual = critical_equation_residual(Bubble(dim=7), x)

    assert abs(residual) <= 1e-12 * bubble_eval(Bubble(dim=7), x) ** 1.8


def test_gradient_and_hessian_match_finite_differences():
    b = Bubble(dim=7, mu=0.8, center=[0.1] * 7)
    x = np.linspace(-0.5, 0.7, 7)
    h = 1e-5
    eye = np.eye(7)

    numeric_gradient = np.array([
        (bubble_eval(b, x + h * e) - bubble_eval(b, x - h * e)) / (2 * h) for e in eye
    ])
    numeric_hessian = np.array([
        (bubble_eval(b, x + h * e, "gradient") - bubble_eval(b, x - h * e, "gradient")) / (2 * h) for e in eye
    ])
    hessian = bubble_eval(b, x, "hessian")

    assert np.allclose(bubble_eval(b, x, "gradient"), numeric_gradient, rtol=1e-7, atol=1e-9)
    assert np.allclose(hessian, numeric_hessian, rtol=1e-6, atol=1e-8)
    assert np.array_equal(hessian, hessian.T)


def test_kernel_elements_cover_zero_to_n():
    elements = kernel_elements(7)

    assert [k.index for k in elements] == list(range(8))
    with pytest.raises(ValueError):
        KernelElement(dim=7, index=8)


def test_psi0_at_origin():
    assert kernel_eval(KernelElement(dim=7, index=0), np.zeros(7)) == pytest.approx(2.5 * 35.0 ** 1.25, rel=1e-14)


def test_psi0_is_the_dilation_derivative():
    x = np.array([0.3, -0.2, 0.5, 0.1, 0.0, -0.4, 0.2])
    h = 1e-5

    def dilated(lam):
        return lam ** 2.5 * bubble_eval(Bubble(dim=7), lam * x)

    numeric = (dilated(1 + h) - dilated(1 - h)) / (2 * h)

    assert kernel_eval(KernelElement(dim=7, index=0), x) == pytest.approx(numeric, rel=1e-8)


def test_psi_i_is_the_partial_derivative():
    x = np.array([0.3, -0.2, 0.5, 0.1, 0.0, -0.4, 0.2])
    gradient = bubble_eval(Bubble(dim=7), x, "gradient")

    for i in range(1, 8):
        assert kernel_eval(KernelElement(dim=7, index=i), x) == pytest.approx(gradient[i - 1], rel=1e-13, abs=1e-15)


def test_psi_i_parity():
    x = np.array([0.3, -0.2, 0.5, 0.1, 0.6, -0.4, 0.2])
    k = KernelElement(dim=7, index=3)
    reflected = x.copy()
    reflected[2] = -reflected[2]

    assert kernel_eval(k, reflected) == pytest.approx(-kernel_eval(k, x), rel=1e-14)
    other = x.copy()
    other[0] = -other[0]
    assert kernel_eval(k, other) == pytest.approx(kernel_eval(k, x), rel=1e-14)


def test_psi0_decay():
    x = np.zeros(7)
    x[0] = 1e3
    leading = -(7 - 2) / 2.0 * bubble_constant(7) * 1e3 ** -(7 - 2)

    assert kernel_eval(KernelElement(dim=7, index=0), x) == pytest.approx(leading, rel=1e-5)


@pytest.mark.parametrize("dim, index", [(7, 0), (9, 3), (11, 11)])
def test_kernel_elements_solve_the_linearized_equation(dim, index):
    rng = np.random.default_rng(dim + index)
    k = KernelElement(dim=dim, index=index)

    for x in 2.0 * rng.standard_normal((50, dim)):
        r = float(np.linalg.norm(x))
        assert abs(linearized_residual(k, x)) <= 1e-9 * (1.0 + r) ** (-dim) + 1e-12


def test_residual_detects_a_non_kernel_profile():
    dim = 7
    p = float(critical_exponent(dim))
    x = np.full(dim, 0.3)
    perturbed = kernel_profile(dim, 0) + bubble_profile(dim)
    u = bubble_eval(Bubble(dim=dim), x)

    residual = profile_residual(perturbed, dim, x)

    assert residual == pytest.approx((1.0 - p) * u ** p, rel=1e-12)
    assert abs(residual) > 1.0


def test_v_decay_envelope():
    assert v_decay_envelope(np.zeros(7), 7, c_env=2.0) == 2.0
    assert v_decay_envelope(np.array([1.0] + [0.0] * 6), 7, c_env=1.0) == pytest.approx(2.0 ** -1.5)
    with pytest.raises(DimensionTooLow):
        v_decay_envelope(np.zeros(6), 6)
