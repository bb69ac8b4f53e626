import math
from fractions import Fraction

import pytest

from app.core.exceptions import ComputationFailed, ConfigInvalid, DegenerateWeyl, StepTooSmall
from app.services.reduced.maximize import (
    BRACKET,
    golden_section,
    hessian_check,
    log_closed_form_heights,
    maximize_sequential,
    sequential_probes,
)
from app.services.reduced.model import build_reduced_model, g1, g_ell, level_terms, reduced_energy_model


@pytest.fixture()
def model3(consts7):
    return build_reduced_model(7, 3, 1.0, consts=consts7)


def test_golden_section_finds_interior_maximum():
    x = golden_section(lambda t: -(t - 2.0) ** 2, 0.0, 5.0)

    assert x == pytest.approx(2.0, abs=1e-9)


def test_first_height_closed_form(model3):
    d_star, _ = maximize_sequential(model3)

    assert d_star[0] == pytest.approx(math.sqrt(model3.b_n / (2.0 * model3.a_n)))


def test_later_heights_follow_recursion(model3):
    log_d = log_closed_form_heights(model3)
    factor = 2.0 * math.log(5.0 * model3.c_n / (4.0 * model3.b_n))

    # 2/(6-N) = -2 and (N-2)/(N-6) = 5 at N = 7
    assert log_d[1] == pytest.approx(-factor + 5.0 * log_d[0])
    assert log_d[2] == pytest.approx(-factor + 5.0 * log_d[1])


def test_closed_form_agrees_with_golden_section(model3):
    _, report = maximize_sequential(model3)

    assert report.agrees
    assert report.all_concave
    assert report.max_relative_difference <= 1e-8
    assert [level.level for level in report.levels] == [1, 2, 3]
    # -c a (a - 1) + 2 with c a = 2 at a stationary point
    assert report.levels[0].scaled_second_derivative == pytest.approx(-4.0)
    assert report.levels[1].scaled_second_derivative == pytest.approx(-1.0)


def test_level_maxima_beat_neighbours(model3):
    d_star, _ = maximize_sequential(model3)

    assert g1(model3, d_star[0]) > g1(model3, 1.01 * d_star[0])
    assert g1(model3, d_star[0]) > g1(model3, 0.99 * d_star[0])
    assert g_ell(model3, 2, d_star[0], d_star[1]) > g_ell(model3, 2, d_star[0], 1.01 * d_star[1])


def test_probes_pass(model3):
    report = sequential_probes(model3, count=500, seed=3)

    assert report.passed
    assert report.worst_gain < 0.0


def test_argmax_invariant_under_common_rescaling(model3):
    base = log_closed_form_heights(model3)
    scaled = log_closed_form_heights(model3.rescaled(7.5))

    assert scaled == pytest.approx(base)


def test_interaction_coefficient_shifts_second_height(model3):
    factor = 3.0
    base = log_closed_form_heights(model3)
    shifted = log_closed_form_heights(model3.model_copy(update={"c_n": factor * model3.c_n}))

    assert shifted[0] == pytest.approx(base[0])
    assert shifted[1] - base[1] == pytest.approx(2.0 / (6 - 7) * math.log(factor))


def test_degenerate_weyl_is_rejected(consts7):
    flat = build_reduced_model(7, 2, 0.0, consts=consts7)

    with pytest.raises(DegenerateWeyl):
        maximize_sequential(flat)


def test_hessian_negative_definite_at_maximizer(model3):
    d_star, _ = maximize_sequential(model3)
    report = hessian_check(model3, d_star, 1e-3, fd_step=1e-3)

    assert report.negdef
    assert len(report.eigenvalues) == 3
    assert report.max_eigenvalue < 0.0


def test_hessian_detects_convex_first_level(consts7):
    single = build_reduced_model(7, 1, 1.0, consts=consts7)
    d_star, _ = maximize_sequential(single)

    assert not hessian_check(single, [0.5 * d_star[0]], 1e-3).negdef
    assert hessian_check(single, [2.0 * d_star[0]], 1e-3).negdef


def test_hessian_rejects_bad_inputs(model3):
    d_star, _ = maximize_sequential(model3)

    with pytest.raises(StepTooSmall):
        hessian_check(model3, d_star, 1e-3, fd_step=1e-7)
    with pytest.raises(ConfigInvalid):
        hessian_check(model3, d_star[:2], 1e-3)
    with pytest.raises(ConfigInvalid):
        hessian_check(model3, d_star, 0.0)


def test_reduced_energy_model(model3, consts7):
    d = [1.0, 1.0, 1.0]
    eps = 1e-2
    terms = level_terms(model3, d, eps)

    assert terms[0].to_float() == pytest.approx(eps ** 2 * (model3.b_n - model3.a_n))
    assert terms[1].log10() == pytest.approx(-20.0 + math.log10(abs(model3.b_n - model3.c_n)))
    assert reduced_energy_model(model3, d, eps) == pytest.approx(
        3.0 * consts7.kn_pow / 7.0 + eps ** 2 * (model3.b_n - model3.a_n)
    )


def test_model_input_checks(model3):
    with pytest.raises(ConfigInvalid):
        level_terms(model3, [1.0, 1.0], 1e-2)
    with pytest.raises(ConfigInvalid):
        g_ell(model3, 1, 1.0, 1.0)
    with pytest.raises(ConfigInvalid):
        build_reduced_model(7, 2, 1.0, coefficient_source="guess")


def test_quadrature_coefficients(consts7):
    model = build_reduced_model(7, 2, 1.0, consts=consts7, coefficient_source="quadrature")

    assert model.b_n == consts7.b_hat
    assert model.c_n == consts7.c_hat
    assert model.a_n == consts7.a_n


def test_levels_vanish_at_small_heights_and_diverge_at_large_ones(model3):
    d_star, report = maximize_sequential(model3)
    lo, hi = BRACKET

    for entry in report.levels:
        if entry.level == 1:
            level = lambda d: g1(model3, d)
        else:
            level = lambda d, prev=d_star[entry.level - 2], ell=entry.level: g_ell(model3, ell, prev, d)
        peak = abs(entry.maximum)

        assert abs(level(lo * entry.closed_form)) <= 1e-9 * peak
        assert level(hi * entry.closed_form) < -1e6 * peak
        assert level(10.0 * hi * entry.closed_form) < level(hi * entry.closed_form)


def test_schedule_must_start_at_theta_two(model3):
    thetas = [Fraction(3)] + list(model3.schedule.thetas[1:])
    broken = model3.model_copy(update={"schedule": model3.schedule.model_copy(update={"thetas": thetas})})

    with pytest.raises(ComputationFailed) as exc:
        level_terms(broken, [1.0, 1.0, 1.0], 1e-3)
    assert exc.value.details["theta_1"] == "3"
