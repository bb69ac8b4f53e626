"""
The tower ansatz W_j = chi * mu_j^{-(N-2)/2} U(x / mu_j) and its annuli.

Scales are handled through ln mu_j throughout; for N = 7, k = 3 and
eps = 1e-4 already mu_3 ~ 1e-98, and deeper towers leave double range.
Log-profiles below take the log-radius s = ln |x|.
"""
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.exceptions import ComputationFailed, IndexOutOfRange, NonMonotoneScales
from app.services.bubbles.bubble import bubble_constant, v_decay_envelope
from app.services.quadrature.base import RadialInterval
from app.services.tower.config import TowerConfig


def log_mu_schedule(cfg: TowerConfig) -> np.ndarray:
    """ln mu_j = ln d_j + gamma_j ln eps."""
    log_eps = math.log(cfg.eps)
    return np.array([
        math.log(h) + float(g) * log_eps
        for h, g in zip(cfg.d, cfg.schedule.gammas)
    ])


def mu_schedule(cfg: TowerConfig) -> np.ndarray:
    """mu_j = d_j eps^{gamma_j} (zero where it underflows)."""
    with np.errstate(under="ignore"):
        return np.exp(log_mu_schedule(cfg))


def log_ratio(cfg: TowerConfig, level: int) -> float:
    """ln(mu_l / mu_{l-1}) = ln(d_l / d_{l-1}) + (2 theta_l / (N-2)) ln eps."""
    check_level(cfg, level)
    theta = cfg.schedule.thetas[level - 1]
    return (
        math.log(cfg.d[level - 1] / cfg.d[level - 2])
        + float(2 * theta / (cfg.dim - 2)) * math.log(cfg.eps)
    )


def check_level(cfg: TowerConfig, level: int) -> None:
    if not 2 <= level <= cfg.k:
        raise IndexOutOfRange(
            "interaction levels run from 2 to k; level 1 has no inner neighbour",
            details={"level": level, "k": cfg.k},
        )


def check_bubble(cfg: TowerConfig, j: int) -> None:
    if not 1 <= j <= cfg.k:
        raise IndexOutOfRange("bubble index outside the tower", details={"j": j, "k": cfg.k})


def log_bubble(dim: int, log_mu: float, s: np.ndarray) -> np.ndarray:
    """ln(mu^{-(N-2)/2} U(x/mu)) = ln alpha_N + ((N-2)/2)(ln mu - ln(mu^2 + r^2))."""
    half = 0.5 * (dim - 2)
    return math.log(bubble_constant(dim)) + half * log_mu - half * np.logaddexp(2.0 * log_mu, 2.0 * s)


def log_bubble_slope(dim: int, log_mu: float, s: np.ndarray) -> np.ndarray:
    """ln |d/dr mu^{-(N-2)/2} U(x/mu)| = ln(alpha (N-2)) + ((N-2)/2) ln mu + s - (N/2) ln(mu^2 + r^2)."""
    return (
        math.log(bubble_constant(dim) * (dim - 2))
        + 0.5 * (dim - 2) * log_mu
        + s
        - 0.5 * dim * np.logaddexp(2.0 * log_mu, 2.0 * s)
    )


class TowerProfile:
    """Log-space evaluation of the cut-off bubbles of one configuration."""

    def __init__(self, cfg: TowerConfig):
        self.cfg = cfg
        self.dim = cfg.dim
        self.log_mu = log_mu_schedule(cfg)

    def _log_cutoff(self, s: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", under="ignore"):
            r = np.exp(s)
        return self.cfg.cutoff.log_value(r)

    def log_w(self, j: int, s: np.ndarray) -> np.ndarray:
        """ln W_j(e^s), -inf beyond r0."""
        s = np.asarray(s, dtype=float)
        return self._log_cutoff(s) + log_bubble(self.dim, self.log_mu[j - 1], s)

    def log_w_slope(self, j: int, s: np.ndarray) -> np.ndarray:
        """ln |W_j'(e^s)| from (chi U_mu)' = chi U_mu' + chi' U_mu, both terms <= 0."""
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore", under="ignore"):
            r = np.exp(s)
        chi = self.cfg.cutoff
        with np.errstate(divide="ignore"):
            log_chi = np.log(chi.value(r))
            log_chi_slope = np.log(np.abs(chi.derivative(r)))
        log_mu = self.log_mu[j - 1]
        return np.logaddexp(
            log_chi + log_bubble_slope(self.dim, log_mu, s),
            log_chi_slope + log_bubble(self.dim, log_mu, s),
        )

    def log_sum(self, indices, s: np.ndarray) -> np.ndarray:
        """ln sum_{j in indices} W_j(e^s)."""
        s = np.asarray(s, dtype=float)
        total = np.full_like(s, -np.inf)
        for j in indices:
            total = np.logaddexp(total, self.log_w(j, s))
        return total


def tower_eval(cfg: TowerConfig, x) -> float:
    """
    sum_j W_j(x) in floating point.

    On |x| <= r0/2 this is the plain bubble sum (chi is not evaluated); on
    |x| >= r0 it is exactly 0. With ``include_v_envelope`` each bubble also
    carries mu_j^2 times the decay envelope of the correction V at x / mu_j.
    """
    x = np.asarray(x, dtype=float)
    r = math.sqrt(float(np.dot(x, x)))
    if r >= cfg.r0:
        return 0.0
    n = cfg.dim
    s = math.log(r) if r > 0.0 else -math.inf
    total = 0.0
    for log_mu in log_mu_schedule(cfg):
        term = math.exp(float(log_bubble(n, log_mu, np.array(s))))
        if cfg.include_v_envelope:
            mu = math.exp(log_mu)
            term += mu ** 2 * mu ** (-(n - 2) / 2.0) * v_decay_envelope(x / mu, n)
        total += term
    if r > 0.5 * cfg.r0:
        total *= float(cfg.cutoff.value(r))
    return total


class AnnuliDecomposition(BaseModel):
    """
    Shells A_h = [sqrt(mu_h mu_{h+1}), sqrt(mu_{h-1} mu_h)), h = 1..k.

    mu_0 = r0^2 / mu_1 and mu_{k+1} = 0, so A_1 ends at r0 and A_k is a ball.
    ``log_bounds[h]`` is the log of the radius separating A_h and A_{h+1};
    ``log_bounds[0] = ln r0`` and ``log_bounds[k] = -inf``.
    """
    model_config = ConfigDict(frozen=True)

    dim: int
    log_mu: List[float]
    log_bounds: List[float]

    @property
    def k(self) -> int:
        return len(self.log_mu)

    def log_shell(self, h: int) -> Tuple[float, float]:
        if not 1 <= h <= self.k:
            raise IndexOutOfRange("shell index outside the tower", details={"h": h, "k": self.k})
        return self.log_bounds[h], self.log_bounds[h - 1]

    def shell(self, h: int) -> RadialInterval:
        ln_inner, ln_outer = self.log_shell(h)
        outer = math.exp(ln_outer)
        if outer == 0.0:
            raise ComputationFailed(
                "shell radii lie below double range; use log_shell",
                details={"h": h, "ln_outer": ln_outer},
            )
        return RadialInterval(inner=math.exp(ln_inner), outer=outer)

    @property
    def shells(self) -> List[RadialInterval]:
        return [self.shell(h) for h in range(1, self.k + 1)]

    def shell_of(self, radius: float) -> Optional[int]:
        """Index of the shell containing ``radius`` (None outside [0, r0))."""
        s = math.log(radius) if radius > 0.0 else -math.inf
        for h in range(1, self.k + 1):
            ln_inner, ln_outer = self.log_shell(h)
            if ln_inner <= s < ln_outer:
                return h
        return None


def annuli(cfg: TowerConfig) -> AnnuliDecomposition:
    """Build the annuli decomposition, rejecting non-decreasing scales."""
    log_mu = log_mu_schedule(cfg)
    log_r0 = math.log(cfg.r0)
    chain = [2.0 * log_r0 - log_mu[0]] + list(log_mu)
    if any(not chain[i] > chain[i + 1] for i in range(len(chain) - 1)):
        raise NonMonotoneScales(
            "concentration scales must decrease strictly and mu_1 must lie below r0",
            details={"log_mu": [float(v) for v in log_mu], "r0": cfg.r0},
        )
    bounds = [0.5 * (chain[h] + chain[h + 1]) for h in range(cfg.k)] + [-math.inf]
    return AnnuliDecomposition(dim=cfg.dim, log_mu=[float(v) for v in log_mu], log_bounds=bounds)
