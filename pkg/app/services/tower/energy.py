"""
Flat-model energy of the tower.

    J(u) = 1/2 int |grad u|^2 + (eps/2) int u^2 - 1/(p+1) int u_+^{p+1}

is split level by level, J(W_1 + ... + W_k) = sum_l a_l with
a_l = J(W_1 + ... + W_l) - J(W_1 + ... + W_{l-1}), and each a_l is measured
directly as K_N^{-N}/N plus a small excess, so the excess is never obtained by
subtracting nearly equal floats.

With h(rho) = alpha_N (mu^2 + rho^2)^{-(N-2)/2}, so that U_mu = mu^{(N-2)/2} h,

    J(W_l) - K_N^{-N}/N = eps mu^2 b_hat + mu^{N-2} (-(eps/2) T0 + T1/2) - mu^N T2/(p+1)

with T0 = int (1 - chi^2) h^2, T1 = int |(chi h)'|^2 - |h'|^2 and
T2 = int (chi^{p+1} - 1) h^{p+1}, all supported on |x| >= r0/2. For l >= 2,
with A = W_1 + ... + W_{l-1} and B = W_l, the cross term is

    X_l = int grad A . grad B + eps int A B - int F(A + B) - F(A) - F(B),

F(u) = u^{p+1}/(p+1), three positive integrals evaluated in log space.
"""
import math
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.config import QUAD_REL_TOL
from app.core.logging_config import get_logger
from app.services.bubbles.bubble import bubble_constant
from app.services.energy.constants import EnergyConstants, get_constants
from app.services.quadrature.base import RadialIntegrand, RadialInterval, ScaledValue
from app.services.quadrature.radial import integrate_log_radial, integrate_radial
from app.services.tower.ansatz import TowerProfile, annuli, log_ratio
from app.services.tower.config import TowerConfig
from app.services.tower.interaction import log_breakpoints, log_superadditive_gap

logger = get_logger(__name__)


class FlatEnergyLevel(BaseModel):
    """Contribution of level l: a_l - K_N^{-N}/N and its reduced model."""
    model_config = ConfigDict(frozen=True)

    level: int
    self_excess: ScaledValue
    cross_term: ScaledValue
    excess: ScaledValue
    model: ScaledValue
    relative_gap: float


class FlatEnergy(BaseModel):
    model_config = ConfigDict(frozen=True)

    dim: int
    k: int
    eps: float
    functional_eps: float
    bubble_energy: float
    levels: List[FlatEnergyLevel]
    excess: ScaledValue
    model_excess: ScaledValue
    relative_gap: float

    @property
    def value(self) -> float:
        """J_eps(sum W_j) as a float."""
        return self.bubble_energy + self.excess.to_float()


def _cutoff_integrals(cfg: TowerConfig, log_mu: float, functional_eps: float, rel_tol: float) -> float:
    """-(eps/2) T0 + T1/2 - mu^2 T2/(p+1), the coefficient of mu^{N-2}."""
    n = cfg.dim
    p = cfg.p
    alpha = bubble_constant(n)
    mu_sq = math.exp(2.0 * log_mu)
    chi = cfg.cutoff

    def h(r):
        return alpha * (mu_sq + r ** 2) ** (-(n - 2) / 2.0)

    def h_slope(r):
        return -alpha * (n - 2) * r * (mu_sq + r ** 2) ** (-n / 2.0)

    def integrand(r: np.ndarray) -> np.ndarray:
        c = chi.value(r)
        hr = h(r)
        t0 = (1.0 - c ** 2) * hr ** 2
        cut_slope = chi.derivative(r) * hr + c * h_slope(r)
        t1 = cut_slope ** 2 - h_slope(r) ** 2
        t2 = (c ** (p + 1.0) - 1.0) * hr ** (p + 1.0)
        return -0.5 * functional_eps * t0 + 0.5 * t1 - mu_sq * t2 / (p + 1.0)

    band = integrate_radial(
        RadialIntegrand(eval=integrand),
        RadialInterval(inner=0.5 * cfg.r0, outer=cfg.r0),
        n,
        rel_tol,
    ).value

    def tail(r: np.ndarray) -> np.ndarray:
        hr = h(r)
        return -0.5 * functional_eps * hr ** 2 - 0.5 * h_slope(r) ** 2 + mu_sq * hr ** (p + 1.0) / (p + 1.0)

    outside = integrate_radial(
        RadialIntegrand(eval=tail, decay_exponent_hint=2.0 * (n - 2)),
        RadialInterval(inner=cfg.r0),
        n,
        rel_tol,
        scale=cfg.r0,
    ).value
    return band + outside


def _self_excess(cfg: TowerConfig, log_mu: float, consts: EnergyConstants, functional_eps: float, rel_tol: float) -> ScaledValue:
    leading = ScaledValue()
    if functional_eps > 0.0:
        leading = ScaledValue.from_log(math.log(functional_eps) + 2.0 * log_mu + math.log(consts.b_hat))
    coefficient = _cutoff_integrals(cfg, log_mu, functional_eps, rel_tol)
    cutoff_term = ScaledValue.from_float(coefficient) * ScaledValue.from_log((cfg.dim - 2) * log_mu)
    return leading + cutoff_term


def _cross_term(cfg: TowerConfig, profile: TowerProfile, level: int, functional_eps: float, rel_tol: float) -> ScaledValue:
    n = cfg.dim
    p = cfg.p
    ln_outer = math.log(cfg.r0)
    breakpoints = log_breakpoints(cfg, profile)
    lower = range(1, level)

    def integral(log_f) -> ScaledValue:
        return integrate_log_radial(log_f, -math.inf, ln_outer, n, rel_tol, breakpoints).value

    gradient = ScaledValue()
    for i in lower:
        gradient = gradient + integral(lambda s, i=i: profile.log_w_slope(i, s) + profile.log_w_slope(level, s))

    mass = ScaledValue()
    if functional_eps > 0.0:
        mass = ScaledValue.from_float(functional_eps) * integral(
            lambda s: profile.log_sum(lower, s) + profile.log_w(level, s)
        )

    nonlinear = integral(
        lambda s: log_superadditive_gap(profile.log_sum(lower, s), profile.log_w(level, s), p + 1.0)
    ) / (p + 1.0)
    return gradient + mass - nonlinear


def _level_model(cfg: TowerConfig, level: int, consts: EnergyConstants) -> ScaledValue:
    """eps^{theta_1} b_hat d_1^2, or eps^{theta_l}(-C_hat (d_l/d_{l-1})^{(N-2)/2} + b_hat d_l^2)."""
    theta = float(cfg.schedule.thetas[level - 1])
    weight = ScaledValue.from_log(theta * math.log(cfg.eps))
    height = cfg.d[level - 1]
    value = consts.b_hat * height ** 2
    if level >= 2:
        value -= consts.c_hat * (height / cfg.d[level - 2]) ** ((cfg.dim - 2) / 2.0)
    return weight * value


def flat_energy(
    cfg: TowerConfig,
    rel_tol: Optional[float] = None,
    functional_eps: Optional[float] = None,
    consts: Optional[EnergyConstants] = None,
) -> FlatEnergy:
    """
    Evaluate J_eps on the tower in the flat model, level by level.

    Args:
        cfg: tower configuration (its eps fixes the scales mu_j)
        rel_tol: quadrature tolerance (defaults to QUAD_REL_TOL)
        functional_eps: eps in the functional; defaults to cfg.eps. Varying it
            with cfg fixed isolates the dependence of J on eps.
        consts: energy constants (defaults to the cached snapshot for N)

    Returns:
        FlatEnergy with per-level excesses and reduced-model values
    """
    rel_tol = QUAD_REL_TOL if rel_tol is None else rel_tol
    functional_eps = cfg.eps if functional_eps is None else functional_eps
    consts = consts or get_constants(cfg.dim)
    annuli(cfg)
    profile = TowerProfile(cfg)

    levels = []
    for level in range(1, cfg.k + 1):
        self_excess = _self_excess(cfg, float(profile.log_mu[level - 1]), consts, functional_eps, rel_tol)
        cross = _cross_term(cfg, profile, level, functional_eps, rel_tol) if level >= 2 else ScaledValue()
        excess = self_excess + cross
        model = _level_model(cfg, level, consts)
        levels.append(FlatEnergyLevel(
            level=level,
            self_excess=self_excess,
            cross_term=cross,
            excess=excess,
            model=model,
            relative_gap=excess.relative_difference(model) if not model.is_zero else math.inf,
        ))

    excess = ScaledValue()
    model_excess = ScaledValue()
    for entry in levels:
        excess = excess + entry.excess
        model_excess = model_excess + entry.model

    result = FlatEnergy(
        dim=cfg.dim,
        k=cfg.k,
        eps=cfg.eps,
        functional_eps=functional_eps,
        bubble_energy=cfg.k * consts.kn_pow / cfg.dim,
        levels=levels,
        excess=excess,
        model_excess=model_excess,
        relative_gap=excess.relative_difference(model_excess) if not model_excess.is_zero else math.inf,
    )
    logger.info(
        "Flat energy evaluated",
        extra={"dim": cfg.dim, "k": cfg.k, "eps": cfg.eps, "relative_gap": result.relative_gap},
    )
    return result


def interaction_model(cfg: TowerConfig, level: int, consts: Optional[EnergyConstants] = None) -> ScaledValue:
    """C_hat (mu_l / mu_{l-1})^{(N-2)/2}, the leading interaction."""
    consts = consts or get_constants(cfg.dim)
    return ScaledValue.from_float(consts.c_hat) * ScaledValue.from_log(0.5 * (cfg.dim - 2) * log_ratio(cfg, level))
