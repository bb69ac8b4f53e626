"""
eps-sweeps of tower quantities and log-log slope fits.

Points are evaluated in a thread pool; ``Executor.map`` keeps results in grid
order, so the aggregated series does not depend on scheduling.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.stats import linregress

from app.core.config import TOWER_THREADS
from app.core.exceptions import ConfigInvalid, NonPositiveValue, TooFewPoints
from app.core.logging_config import get_logger
from app.services.quadrature.base import ScaledValue
from app.services.tower.ansatz import log_ratio
from app.services.tower.config import TowerConfig
from app.services.tower.energy import interaction_model
from app.services.tower.interaction import annulus_norm, error_component_II, interaction_integral

logger = get_logger(__name__)

DEFAULT_EPS_RANGE = (1e-6, 1e-3)
POINTS_PER_DECADE = 8
TRIM_FRACTION = 0.25
MIN_FIT_POINTS = 4


def scaled_text(value: ScaledValue) -> str:
    """mantissa e exponent, readable by float() whenever the value is in double range."""
    return f"{value.mantissa!r}e{value.log10_scale}"


class SweepSeries(BaseModel):
    """Measured values against eps and the scale ratio mu_l / mu_{l-1}."""
    model_config = ConfigDict(frozen=True)

    eps_grid: List[float]
    values: List[ScaledValue]
    ratio: List[ScaledValue]
    model_values: Optional[List[ScaledValue]] = None

    @model_validator(mode="after")
    def _check_grid(self) -> "SweepSeries":
        if len(self.values) != len(self.eps_grid) or len(self.ratio) != len(self.eps_grid):
            raise ValueError("eps_grid, values and ratio must have equal length")
        if any(not a > b for a, b in zip(self.eps_grid, self.eps_grid[1:])):
            raise ValueError("eps_grid must be strictly decreasing")
        return self

    def __len__(self) -> int:
        return len(self.eps_grid)

    def rows(self) -> List[dict]:
        """CSV rows: eps, ratio, value_mantissa, value_log10, model_value."""
        rows = []
        for index, eps in enumerate(self.eps_grid):
            value = self.values[index]
            model = self.model_values[index] if self.model_values else None
            rows.append({
                "eps": repr(eps),
                "ratio": scaled_text(self.ratio[index]),
                "value_mantissa": repr(value.mantissa),
                "value_log10": str(value.log10_scale),
                "model_value": "" if model is None else scaled_text(model),
            })
        return rows


class SlopeFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    slope: float
    intercept: float
    stderr: float
    points: int


def eps_grid(
    lo: float = DEFAULT_EPS_RANGE[0],
    hi: float = DEFAULT_EPS_RANGE[1],
    per_decade: int = POINTS_PER_DECADE,
    max_points: Optional[int] = None,
) -> List[float]:
    """Log-spaced, strictly decreasing grid from hi down to lo."""
    if not 0.0 < lo < hi:
        raise ConfigInvalid("eps range must satisfy 0 < lo < hi", details={"lo": lo, "hi": hi})
    count = int(round(per_decade * math.log10(hi / lo))) + 1
    if max_points is not None:
        count = min(count, max_points)
    count = max(count, 2)
    return [float(v) for v in np.geomspace(hi, lo, count)]


def _workers(threads: Optional[int]) -> int:
    threads = TOWER_THREADS if threads is None else threads
    return threads if threads > 0 else (os.cpu_count() or 1)


def run_sweep(
    base: TowerConfig,
    level: int,
    measure: Callable[[TowerConfig], ScaledValue],
    grid: Sequence[float],
    model: Optional[Callable[[TowerConfig], ScaledValue]] = None,
    threads: Optional[int] = None,
) -> SweepSeries:
    """
    Evaluate ``measure`` at every eps of ``grid`` with the other settings of ``base``.

    ``level`` selects the ratio mu_l / mu_{l-1} recorded next to each value.
    """
    configs = [base.with_eps(eps) for eps in grid]

    def point(cfg: TowerConfig):
        value = measure(cfg)
        logger.debug("Sweep point evaluated", extra={"eps": cfg.eps, "log10_value": value.log10()})
        return value

    with ThreadPoolExecutor(max_workers=_workers(threads)) as pool:
        values = list(pool.map(point, configs))

    ratios = [ScaledValue.from_log(log_ratio(cfg, level)) for cfg in configs]
    models = [model(cfg) for cfg in configs] if model else None
    logger.info("Sweep finished", extra={"points": len(configs), "level": level})
    return SweepSeries(eps_grid=list(grid), values=values, ratio=ratios, model_values=models)


def trimmed_count(points: int, fraction: float = TRIM_FRACTION) -> int:
    """Points dropped by ``trim`` from a series of ``points``."""
    return int(math.floor(fraction * points))


def trim(series: SweepSeries, fraction: float = TRIM_FRACTION) -> SweepSeries:
    """Drop the largest-eps ``fraction`` of the points (the preasymptotic end)."""
    drop = trimmed_count(len(series), fraction)
    return SweepSeries(
        eps_grid=series.eps_grid[drop:],
        values=series.values[drop:],
        ratio=series.ratio[drop:],
        model_values=series.model_values[drop:] if series.model_values else None,
    )


def slope_fit(s: SweepSeries) -> SlopeFit:
    """Least squares of ln(value) against ln(ratio)."""
    if len(s) < MIN_FIT_POINTS:
        raise TooFewPoints("slope fit needs at least four points", details={"points": len(s)})
    bad = [i for i, v in enumerate(s.values) if v.sign <= 0.0]
    if bad:
        raise NonPositiveValue("log-log fit needs strictly positive values", details={"indices": bad})
    x = np.array([r.ln() for r in s.ratio])
    y = np.array([v.ln() for v in s.values])
    fit = linregress(x, y)
    return SlopeFit(slope=float(fit.slope), intercept=float(fit.intercept), stderr=float(fit.stderr), points=len(s))


Quantity = Literal["interaction", "annulus-norm", "error"]


def sweep_measure(quantity: Quantity, level: int = 2) -> Callable[[TowerConfig], ScaledValue]:
    """
    Measured quantity for a sweep at ``level``.

    interaction:  int over A_{l-1} of f(W_{l-1}) W_l
    annulus-norm: |W_l|_{2N/(N-2), A_{l-1}}
    error:        L^{2N/(N+2)} norm of the nonlinear cross term
    """
    if quantity == "interaction":
        return lambda cfg: interaction_integral(cfg, level)
    if quantity == "annulus-norm":
        return lambda cfg: annulus_norm(cfg, level, 2.0 * cfg.dim / (cfg.dim - 2), h=level - 1)
    if quantity == "error":
        return lambda cfg: error_component_II(cfg, level)
    raise ConfigInvalid(f"unknown sweep quantity: {quantity}")


def sweep_model(quantity: Quantity, level: int = 2) -> Optional[Callable[[TowerConfig], ScaledValue]]:
    """Leading-order model next to the measured values, where one exists."""
    if quantity == "interaction":
        return lambda cfg: interaction_model(cfg, level)
    return None


def expected_slope(quantity: Quantity, dim: int) -> float:
    """(N-2)/2, (N-2)/4 and (N+2)/4 against mu_l / mu_{l-1}."""
    return {"interaction": (dim - 2) / 2.0, "annulus-norm": (dim - 2) / 4.0, "error": (dim + 2) / 4.0}[quantity]
