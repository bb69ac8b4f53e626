import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.exceptions import IndexOutOfRange, NonMonotoneScales
from app.services.bubbles.bubble import Bubble, bubble_eval
from app.services.quadrature.base import RadialIntegrand, RadialInterval
from app.services.quadrature.radial import integrate_radial
from app.services.tower.ansatz import annuli, log_mu_schedule, log_ratio, mu_schedule, tower_eval
from app.services.tower.config import CutoffSpec, TowerConfig


def test_scales_for_two_bubbles_in_dimension_seven(tower_config):
    mu = mu_schedule(tower_config)

    assert mu[0] == pytest.approx(1e-2, rel=1e-12)
    assert mu[1] == pytest.approx(1e-18, rel=1e-12)


def test_deep_scales_stay_finite_in_log_space():
    cfg = TowerConfig(dim=7, k=4, d=[1.0] * 4, eps=1e-4)
    log_mu = log_mu_schedule(cfg)

    # gamma_4 = 249/2
    assert log_mu[3] / math.log(10.0) == pytest.approx(-498.0)
    assert mu_schedule(cfg)[3] == 0.0


def test_scale_ratio(tower_config):
    assert log_ratio(tower_config, 2) == pytest.approx(math.log(1e-16))
    with pytest.raises(IndexOutOfRange):
        log_ratio(tower_config, 1)
    with pytest.raises(IndexOutOfRange):
        log_ratio(tower_config, 3)


def test_annuli_split_at_geometric_means(tower_config):
    decomposition = annuli(tower_config)

    assert decomposition.log_bounds[0] == pytest.approx(0.0)
    assert decomposition.log_bounds[1] == pytest.approx(math.log(1e-10))
    assert decomposition.log_bounds[2] == -math.inf
    assert decomposition.shell(1).outer == pytest.approx(1.0)
    assert decomposition.shell(2).inner == 0.0
    assert decomposition.shell_of(1e-5) == 1
    assert decomposition.shell_of(1e-12) == 2
    assert decomposition.shell_of(0.0) == 2
    assert decomposition.shell_of(2.0) is None


def test_annuli_partition_the_cutoff_ball():
    cfg = TowerConfig(dim=10, k=3, d=[1.0, 1.0, 1.0], eps=1e-2)
    decomposition = annuli(cfg)
    c1, c2 = np.random.default_rng(5).uniform(0.5, 2.0, size=2)
    g = RadialIntegrand(eval=lambda r: c1 * (1.0 + r ** 2) ** -3 + c2 * (1.0 + (r / 1e-3) ** 2) ** -6)
    interior = [math.exp(b) for b in decomposition.log_bounds[1:-1]]

    pieces = [integrate_radial(g, decomposition.shell(h), cfg.dim, rel_tol=1e-10).value for h in range(1, cfg.k + 1)]
    whole = integrate_radial(g, RadialInterval(inner=0.0, outer=cfg.r0), cfg.dim, rel_tol=1e-10, breakpoints=interior).value

    assert all(p > 0.0 for p in pieces)
    assert abs(sum(pieces) - whole) <= 2e-10 * whole


@pytest.mark.parametrize("heights,eps", [([1.0, 1e20], 1e-4), ([1e3, 1.0], 1e-4)])
def test_non_monotone_scales_are_rejected(heights, eps):
    cfg = TowerConfig(dim=7, k=2, d=heights, eps=eps)

    with pytest.raises(NonMonotoneScales):
        annuli(cfg)


def test_tower_config_validation():
    with pytest.raises(ValidationError):
        TowerConfig(dim=6, k=1, d=[1.0], eps=1e-3)
    with pytest.raises(ValidationError):
        TowerConfig(dim=7, k=2, d=[1.0], eps=1e-3)
    with pytest.raises(ValidationError):
        TowerConfig(dim=7, k=1, d=[-1.0], eps=1e-3)


def test_cutoff_keywords_fold_into_spec():
    cfg = TowerConfig(dim=7, k=1, d=[1.0], eps=1e-3, r0=4.0, cutoff_profile="exp_bump")

    assert cfg.cutoff == CutoffSpec(r0=4.0, profile="exp_bump")
    assert cfg.r0 == 4.0


@pytest.mark.parametrize("profile", ["smoothstep_quintic", "exp_bump"])
def test_cutoff_shape(profile):
    chi = CutoffSpec(r0=2.0, profile=profile)
    r = np.linspace(0.0, 3.0, 301)
    values = chi.value(r)

    assert np.all(values[r <= 1.0] == 1.0)
    assert np.all(values[r >= 2.0] == 0.0)
    assert np.all(np.diff(values) <= 1e-15)


@pytest.mark.parametrize("profile", ["smoothstep_quintic", "exp_bump"])
def test_cutoff_derivative_matches_finite_difference(profile):
    chi = CutoffSpec(r0=2.0, profile=profile)
    r = np.linspace(1.05, 1.95, 19)
    h = 1e-6
    numeric = (chi.value(r + h) - chi.value(r - h)) / (2.0 * h)

    np.testing.assert_allclose(chi.derivative(r), numeric, rtol=1e-6, atol=1e-8)


def test_tower_eval_is_bubble_sum_inside_half_radius(tower_config):
    x = np.full(7, 0.01)
    expected = sum(
        float(bubble_eval(Bubble(dim=7, mu=mu), x)) for mu in mu_schedule(tower_config)
    )

    assert tower_eval(tower_config, x) == pytest.approx(expected, rel=1e-12)
    assert tower_eval(tower_config, np.array([1.0] + [0.0] * 6)) == 0.0


def test_tower_eval_with_envelope_is_larger(tower_config):
    x = np.full(7, 0.02)
    enveloped = tower_config.model_copy(update={"include_v_envelope": True})

    assert tower_eval(enveloped, x) > tower_eval(tower_config, x)
