"""
Interaction and error quantities of the tower, measured by log-radial quadrature.

Every integrand is positive and is handed to the quadrature as its logarithm,
so results come back as ScaledValues however small the scales get.
"""
import math
from typing import List, Optional

import numpy as np

from app.core.config import SWEEP_REL_TOL
from app.core.exceptions import IndexOutOfRange
from app.core.logging_config import get_logger
from app.services.quadrature.base import ScaledValue
from app.services.quadrature.radial import integrate_log_radial, lq_norm_log_shell
from app.services.tower.ansatz import (
    TowerProfile,
    annuli,
    check_bubble,
    check_level,
)
from app.services.tower.config import TowerConfig

logger = get_logger(__name__)


def log_superadditive_gap(log_a: np.ndarray, log_b: np.ndarray, p: float) -> np.ndarray:
    """
    ln((A + B)^p - A^p - B^p) for A, B >= 0 and p > 1, from ln A and ln B.

    With M = max(A, B) and t = min/max the gap is M^p ((1 + t)^p - 1 - t^p);
    for t < e^{-30} it is evaluated as M^p t (p - t^{p-1}).
    """
    log_a = np.asarray(log_a, dtype=float)
    log_b = np.asarray(log_b, dtype=float)
    top = np.maximum(log_a, log_b)
    empty = np.isneginf(np.minimum(log_a, log_b))
    safe_top = np.where(np.isneginf(top), 0.0, top)
    lt = np.where(empty, -np.inf, np.minimum(log_a, log_b) - safe_top)
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        tiny = p * safe_top + lt + np.log(p - np.exp((p - 1.0) * lt))
        t = np.exp(lt)
        full = p * safe_top + np.log(np.expm1(p * np.log1p(t)) - t ** p)
        gap = np.where(lt < -30.0, tiny, full)
    return np.where(empty, -np.inf, gap)


def log_breakpoints(cfg: TowerConfig, profile: TowerProfile) -> List[float]:
    decomposition = annuli(cfg)
    points = list(profile.log_mu) + [b for b in decomposition.log_bounds if math.isfinite(b)]
    points.append(math.log(0.5 * cfg.r0))
    return sorted(set(float(v) for v in points))


def pair_interaction(
    cfg: TowerConfig,
    i: int,
    level: int,
    rel_tol: Optional[float] = None,
) -> ScaledValue:
    """
    int over A_{l-1} of W_i^p W_l for i < l.

    For i = l - 1 this is the leading consecutive-bubble interaction; for
    i < l - 1 it is a much smaller non-adjacent term.
    """
    check_level(cfg, level)
    check_bubble(cfg, i)
    if i >= level:
        raise IndexOutOfRange("pair interaction needs i < l", details={"i": i, "level": level})
    rel_tol = SWEEP_REL_TOL if rel_tol is None else rel_tol
    profile = TowerProfile(cfg)
    ln_inner, ln_outer = annuli(cfg).log_shell(level - 1)
    p = cfg.p

    def log_integrand(s: np.ndarray) -> np.ndarray:
        return p * profile.log_w(i, s) + profile.log_w(level, s)

    result = integrate_log_radial(
        log_integrand, ln_inner, ln_outer, cfg.dim, rel_tol, log_breakpoints(cfg, profile)
    )
    logger.debug(
        "Pair interaction measured",
        extra={"i": i, "level": level, "eps": cfg.eps, "log10_value": result.value.log10()},
    )
    return result.value


def interaction_integral(cfg: TowerConfig, level: int, rel_tol: Optional[float] = None) -> ScaledValue:
    """int over A_{l-1} of f(W_{l-1}) W_l, l in 2..k."""
    check_level(cfg, level)
    return pair_interaction(cfg, level - 1, level, rel_tol)


def annulus_norm(
    cfg: TowerConfig,
    j: int,
    q: float,
    h: Optional[int] = None,
    rel_tol: Optional[float] = None,
) -> ScaledValue:
    """|W_j|_{q, A_h}; ``h=None`` measures over the whole ball B(0, r0)."""
    check_bubble(cfg, j)
    rel_tol = SWEEP_REL_TOL if rel_tol is None else rel_tol
    profile = TowerProfile(cfg)
    if h is None:
        ln_inner, ln_outer = -math.inf, math.log(cfg.r0)
    else:
        ln_inner, ln_outer = annuli(cfg).log_shell(h)
    return lq_norm_log_shell(
        lambda s: profile.log_w(j, s),
        ln_inner,
        ln_outer,
        q,
        cfg.dim,
        rel_tol,
        log_breakpoints(cfg, profile),
    )


def error_component_II(cfg: TowerConfig, level: int, rel_tol: Optional[float] = None) -> ScaledValue:
    """
    L^{2N/(N+2)}(B(0, r0)) norm of f(sum_{i<=l} W_i) - f(sum_{i<l} W_i) - f(W_l).

    The q-th power is integrated shell by shell and summed before the root.
    """
    check_level(cfg, level)
    rel_tol = SWEEP_REL_TOL if rel_tol is None else rel_tol
    profile = TowerProfile(cfg)
    decomposition = annuli(cfg)
    q = 2.0 * cfg.dim / (cfg.dim + 2)
    p = cfg.p
    lower = range(1, level)

    def log_gap_q(s: np.ndarray) -> np.ndarray:
        gap = log_superadditive_gap(profile.log_sum(lower, s), profile.log_w(level, s), p)
        return q * gap

    breakpoints = log_breakpoints(cfg, profile)
    total = ScaledValue()
    for h in range(1, cfg.k + 1):
        ln_inner, ln_outer = decomposition.log_shell(h)
        total = total + integrate_log_radial(log_gap_q, ln_inner, ln_outer, cfg.dim, rel_tol, breakpoints).value
    return total ** (1.0 / q)
