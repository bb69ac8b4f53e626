import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import beta

from app.core.exceptions import ConfigInvalid, NonIntegrable, ToleranceNotReached, UnsupportedDegree
from app.services.quadrature import gauss_kronrod
from app.services.quadrature.base import RadialIntegrand, RadialInterval, ScaledValue
from app.services.quadrature.gauss_kronrod import adaptive_integrate
from app.services.quadrature.radial import (
    integrate_log_radial,
    integrate_radial,
    lq_norm_shell,
    moment_integral,
    moment_tensor,
    sphere_area,
)


def _bubble_like(dim):
    return RadialIntegrand(eval=lambda r: (1.0 + r ** 2) ** (-dim), decay_exponent_hint=2.0 * dim)


def _bubble_like_exact(dim):
    # sigma_{N-1} * int_0^inf r^{N-1} (1 + r^2)^{-N} dr
    return sphere_area(dim) * 0.5 * beta(0.5 * dim, 0.5 * dim)


def test_sphere_area_low_dimensions():
    assert sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-14)
    assert sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-14)


@pytest.mark.parametrize("dim", [3, 7, 11])
def test_integrate_radial_whole_space(dim):
    result = integrate_radial(_bubble_like(dim), RadialInterval(), dim, rel_tol=1e-11)

    assert result.converged
    assert result.value == pytest.approx(_bubble_like_exact(dim), rel=1e-9)


def test_integrate_radial_gaussian_matches_scipy():
    gaussian = RadialIntegrand(eval=lambda r: np.exp(-r ** 2), decay_exponent_hint=50.0)
    oracle, _ = integrate.quad(lambda r: r ** 4 * math.exp(-r ** 2), 0.0, math.inf)

    result = integrate_radial(gaussian, RadialInterval(), 5)

    assert result.value == pytest.approx(sphere_area(5) * oracle, rel=1e-9)
    assert result.value == pytest.approx(math.pi ** 2.5, rel=1e-9)


def test_integrate_radial_bounded_shell():
    one = RadialIntegrand(eval=lambda r: np.ones_like(r))

    result = integrate_radial(one, RadialInterval(inner=1.0, outer=2.0), 3)

    assert result.value == pytest.approx(4.0 * math.pi / 3.0 * 7.0, rel=1e-12)


def test_slow_decay_on_unbounded_shell_is_rejected():
    slow = RadialIntegrand(eval=lambda r: r ** -2.0, decay_exponent_hint=2.0)

    with pytest.raises(NonIntegrable):
        integrate_radial(slow, RadialInterval(inner=1.0), 3)


def test_missing_decay_hint_is_rejected():
    with pytest.raises(NonIntegrable):
        integrate_radial(RadialIntegrand(eval=lambda r: np.exp(-r)), RadialInterval(), 3)


def test_rel_tol_out_of_range():
    with pytest.raises(ConfigInvalid):
        integrate_radial(_bubble_like(3), RadialInterval(), 3, rel_tol=0.0)


def test_budget_exhaustion_flags_or_raises(monkeypatch):
    monkeypatch.setattr(gauss_kronrod, "QUAD_MAX_PANELS", 1)
    wiggly = RadialIntegrand(eval=lambda r: np.sin(50.0 * r) ** 2)
    shell = RadialInterval(inner=0.0, outer=10.0)

    flagged = integrate_radial(wiggly, shell, 1, rel_tol=1e-12)
    assert not flagged.converged

    with pytest.raises(ToleranceNotReached) as exc:
        integrate_radial(wiggly, shell, 1, rel_tol=1e-12, strict=True)
    assert exc.value.best_estimate is not None
    assert exc.value.best_estimate.converged is False


def test_adaptive_integrate_respects_breakpoints():
    kink = lambda x: np.abs(x - 0.3)

    result = adaptive_integrate(kink, 0.0, 1.0, 1e-12, breakpoints=[0.3])

    assert result.value == pytest.approx(0.5 * (0.3 ** 2 + 0.7 ** 2), rel=1e-13)
    assert result.evaluations == 30


def test_lq_norm_of_constant_on_shell():
    one = RadialIntegrand(eval=lambda r: np.ones_like(r))

    norm = lq_norm_shell(one, RadialInterval(inner=1.0, outer=2.0), 2.0, 3)

    assert norm == pytest.approx(math.sqrt(4.0 * math.pi / 3.0 * 7.0), rel=1e-12)


def test_lq_norm_with_monomial_matches_direct_angular_average():
    # |x_1|^2 averages to r^2 / N over the sphere
    one = RadialIntegrand(eval=lambda r: np.ones_like(r))
    shell = RadialInterval(inner=0.0, outer=1.0)

    norm = lq_norm_shell(one, shell, 1.0, 3, monomial=[2])

    assert norm == pytest.approx(4.0 * math.pi / 15.0, rel=1e-12)


def test_odd_moments_vanish_without_quadrature():
    assert moment_integral(_bubble_like(7), [1, 0, 2], 7) == 0.0
    assert not np.any(moment_tensor(_bubble_like(7), 3, 7))


def test_moment_degree_above_four_is_unsupported():
    with pytest.raises(UnsupportedDegree):
        moment_integral(_bubble_like(11), [2, 2, 2], 11)


def test_second_moment_tensor_is_isotropic():
    gaussian = RadialIntegrand(eval=lambda r: np.exp(-r ** 2), decay_exponent_hint=50.0)

    tensor = moment_tensor(gaussian, 2, 4)

    assert tensor.shape == (4, 4)
    assert np.allclose(tensor, 0.5 * math.pi ** 2 * np.eye(4), rtol=1e-9, atol=0.0)


def test_log_radial_matches_direct_quadrature():
    dim = 7

    result = integrate_log_radial(lambda s: -dim * np.logaddexp(0.0, 2.0 * s), -math.inf, math.inf, dim, rel_tol=1e-11)

    assert result.converged
    assert result.value.to_float() == pytest.approx(_bubble_like_exact(dim), rel=1e-9)


def test_log_radial_handles_scales_below_double_range():
    dim = 7
    log_mu = -200.0 * math.log(10.0)

    def log_f(s):
        return -dim * np.logaddexp(0.0, 2.0 * (s - log_mu))

    result = integrate_log_radial(log_f, -math.inf, math.inf, dim, breakpoints=[log_mu])

    expected = math.log10(_bubble_like_exact(dim)) - 1400.0
    assert result.value.log10() == pytest.approx(expected, abs=1e-8)


def test_scaled_value_arithmetic_outside_double_range():
    tiny = ScaledValue.from_log(-1000.0)
    huge = ScaledValue.from_log(1000.0)

    assert (tiny * tiny).ln() == pytest.approx(-2000.0, rel=1e-12)
    assert (tiny * huge).to_float() == pytest.approx(1.0, rel=1e-12)
    assert (huge + tiny).relative_difference(huge) == 0.0
    assert (tiny / tiny).to_float() == pytest.approx(1.0)
    assert ScaledValue.from_float(0.0).is_zero
    assert tiny < huge


def test_scaled_value_mantissa_is_normalised():
    value = ScaledValue.from_float(-0.00345)

    assert value.mantissa == pytest.approx(-3.45)
    assert value.log10_scale == -3


def _gaussian():
    return RadialIntegrand(eval=lambda r: np.exp(-r ** 2), decay_exponent_hint=50.0)


def test_integrate_radial_is_linear():
    a, b = 2.5, -0.75
    f, h = _bubble_like(7), _gaussian()
    combined = RadialIntegrand(eval=lambda r: a * f(r) + b * h(r), decay_exponent_hint=14.0)

    whole = integrate_radial(combined, RadialInterval(), 7, rel_tol=1e-10).value
    parts = [integrate_radial(g, RadialInterval(), 7, rel_tol=1e-10).value for g in (f, h)]

    assert abs(whole - (a * parts[0] + b * parts[1])) <= 2e-10 * (abs(a * parts[0]) + abs(b * parts[1]))


def test_shells_add_up_to_the_whole_space():
    f = _bubble_like(7)

    inner = integrate_radial(f, RadialInterval(inner=0.0, outer=1.3), 7, rel_tol=1e-10).value
    outer = integrate_radial(f, RadialInterval(inner=1.3), 7, rel_tol=1e-10).value
    whole = integrate_radial(f, RadialInterval(), 7, rel_tol=1e-10).value

    assert abs(inner + outer - whole) <= 2e-10 * whole


def test_rescaled_integrand_picks_up_mu_to_the_dimension():
    dim = 7
    reference = integrate_radial(_bubble_like(dim), RadialInterval(), dim, rel_tol=1e-10).value

    for mu in 10.0 ** np.random.default_rng(11).uniform(-3.0, 3.0, size=6):
        scaled = RadialIntegrand(eval=lambda r, mu=mu: (1.0 + (r / mu) ** 2) ** (-dim), decay_exponent_hint=2.0 * dim)
        value = integrate_radial(scaled, RadialInterval(), dim, rel_tol=1e-10, scale=mu).value

        assert value == pytest.approx(mu ** dim * reference, rel=2e-10)


def test_repeated_integration_is_bit_identical():
    first = integrate_radial(_bubble_like(9), RadialInterval(inner=0.5), 9)
    second = integrate_radial(_bubble_like(9), RadialInterval(inner=0.5), 9)

    assert first == second
    assert first.value.hex() == second.value.hex()
