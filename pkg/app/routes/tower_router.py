"""
Tower sweeps and the flat energy check.

`sweep-interaction` and `sweep-error` write the measured series as CSV next
to a JSON summary with the fitted slope against mu_l / mu_{l-1}.
"""
from typing import Any, Dict, Optional

from pydantic import ValidationError

from app.core.exceptions import ConfigInvalid
from app.core.logging_config import get_logger
from app.routes.common import Outcome, RunConfig, add_common_arguments, resolve_heights
from app.services.acceptance.base import PROFILES
from app.services.tower.config import TowerConfig
from app.services.tower.energy import flat_energy
from app.services.tower.sweep import (
    DEFAULT_EPS_RANGE,
    MIN_FIT_POINTS,
    eps_grid,
    expected_slope,
    run_sweep,
    slope_fit,
    sweep_measure,
    sweep_model,
    trim,
    trimmed_count,
)

logger = get_logger(__name__)

SLOPE_TOLERANCE = {"interaction": 0.02, "annulus-norm": 0.03}
ERROR_SLOPE_MARGIN = 0.1
PREFACTOR_TOLERANCE = 0.05
ENERGY_TOLERANCE = 0.1
ENERGY_EPS = 1e-5
ENERGY_R0 = 10.0


def _tower(config: RunConfig, eps: float, r0: Optional[float] = None) -> TowerConfig:
    dim = config.dim or 7
    k = config.k or (len(config.d) if isinstance(config.d, list) else max(2, config.level))
    fields: Dict[str, Any] = {"dim": dim, "k": k, "d": resolve_heights(config, dim, k), "eps": eps}
    r0 = config.r0 if config.r0 is not None else r0
    if r0 is not None:
        fields["r0"] = r0
    try:
        return TowerConfig(**fields)
    except ValidationError as exc:
        raise ConfigInvalid("invalid tower configuration", details={"errors": [e["msg"] for e in exc.errors()]})


def _run(config: RunConfig, quantity: str, partial: Dict[str, Any]) -> Outcome:
    lo = config.eps_lo or DEFAULT_EPS_RANGE[0]
    hi = config.eps_hi or DEFAULT_EPS_RANGE[1]
    cap = config.max_points or PROFILES[config.profile].max_eps_points
    grid = eps_grid(lo, hi, config.per_decade, cap)
    fitted = len(grid) - trimmed_count(len(grid))
    if fitted < MIN_FIT_POINTS:
        raise ConfigInvalid(
            "eps range leaves too few points for the slope fit",
            details={"eps_lo": lo, "eps_hi": hi, "points": len(grid), "fitted": fitted, "required": MIN_FIT_POINTS},
        )
    base = _tower(config, hi)
    partial.update({"quantity": quantity, "level": config.level, "heights": base.d, "eps_grid": grid})

    series = run_sweep(
        base,
        config.level,
        sweep_measure(quantity, config.level),
        grid,
        model=sweep_model(quantity, config.level),
        threads=config.threads,
    )
    rows = series.rows()
    partial["series"] = rows

    fit = slope_fit(trim(series))
    expected = expected_slope(quantity, base.dim)
    summary: Dict[str, Any] = {
        "quantity": quantity,
        "dim": base.dim,
        "k": base.k,
        "level": config.level,
        "heights": base.d,
        "points": len(series),
        "slope": fit.slope,
        "stderr": fit.stderr,
        "intercept": fit.intercept,
        "fitted_points": fit.points,
        "expected_slope": expected,
    }
    if quantity == "error":
        bound = expected - (config.tolerance if config.tolerance is not None else ERROR_SLOPE_MARGIN)
        summary["lower_bound"] = bound
        passed = fit.slope >= bound
    else:
        tolerance = config.tolerance if config.tolerance is not None else SLOPE_TOLERANCE[quantity]
        summary["slope_relative_gap"] = abs(fit.slope - expected) / expected
        summary["tolerance"] = tolerance
        passed = summary["slope_relative_gap"] <= tolerance
        if series.model_values:
            gap = series.values[-1].relative_difference(series.model_values[-1])
            summary["prefactor_relative_gap"] = gap
            passed = passed and gap <= PREFACTOR_TOLERANCE
    summary["passed"] = passed
    logger.info("Sweep summary", extra={"quantity": quantity, "slope": fit.slope, "expected": expected, "passed": passed})
    return Outcome(data=summary, passed=passed, rows=rows)


def run_sweep_interaction(config: RunConfig, partial: Dict[str, Any]) -> Outcome:
    return _run(config, config.quantity or "interaction", partial)


def run_sweep_error(config: RunConfig, partial: Dict[str, Any]) -> Outcome:
    return _run(config, "error", partial)


def run_energy_check(config: RunConfig, partial: Dict[str, Any]) -> Outcome:
    """Flat J_eps of the tower against the sum of its level models."""
    cfg = _tower(config, config.eps or ENERGY_EPS, r0=ENERGY_R0)
    tolerance = config.tolerance if config.tolerance is not None else ENERGY_TOLERANCE
    partial.update({"heights": cfg.d, "eps": cfg.eps, "r0": cfg.r0})
    energy = flat_energy(cfg)
    data = energy.model_dump(mode="json")
    data["tolerance"] = tolerance
    data["passed"] = energy.relative_gap <= tolerance
    return Outcome(data=data, passed=data["passed"])


def _sweep_arguments(parser) -> None:
    parser.add_argument("--dim", type=int, default=7, help="dimension N >= 7")
    parser.add_argument("--k", type=int, help="number of bubbles (default: max(2, level))")
    parser.add_argument("--d", nargs="+", help="tower heights, or 'auto'")
    parser.add_argument("--level", type=int, default=2, help="tower level l >= 2")
    parser.add_argument("--eps-lo", dest="eps_lo", type=float, help="smallest eps")
    parser.add_argument("--eps-hi", dest="eps_hi", type=float, help="largest eps")
    parser.add_argument("--per-decade", dest="per_decade", type=int, help="points per decade of eps")
    parser.add_argument("--max-points", dest="max_points", type=int, help="cap on sweep points")
    parser.add_argument("--profile", choices=["quick", "full"], help="quick caps the grid at 12 points")
    parser.add_argument("--r0", type=float, help="cutoff radius")
    parser.add_argument("--tolerance", type=float, help="pass threshold override")
    parser.add_argument("--threads", type=int, help="sweep workers (default: TOWER_THREADS)")
    parser.add_argument("--weyl-sq", dest="weyl_sq", type=float, help="|W|^2 for --d auto")
    parser.add_argument("--manifold", help="catalog key or inline JSON spec for --d auto")
    parser.add_argument("--catalog", help="manifold catalog path")
    add_common_arguments(parser)


def register(subparsers) -> None:
    interaction = subparsers.add_parser("sweep-interaction", help="consecutive interaction or annulus norm against eps")
    interaction.add_argument("--quantity", choices=["interaction", "annulus-norm"], default="interaction")
    _sweep_arguments(interaction)
    interaction.set_defaults(handler=run_sweep_interaction)

    error = subparsers.add_parser("sweep-error", help="nonlinear cross-term norm against eps")
    _sweep_arguments(error)
    error.set_defaults(handler=run_sweep_error)

    energy = subparsers.add_parser("energy-check", help="flat-model J_eps against the reduced expansion")
    energy.add_argument("--dim", type=int, default=7, help="dimension N >= 7")
    energy.add_argument("--k", type=int, default=2, help="number of bubbles")
    energy.add_argument("--d", nargs="+", help="tower heights, or 'auto'")
    energy.add_argument("--eps", type=float, default=ENERGY_EPS, help="perturbation size")
    energy.add_argument("--r0", type=float, default=ENERGY_R0, help="cutoff radius")
    energy.add_argument("--tolerance", type=float, help="relative gap threshold")
    energy.add_argument("--weyl-sq", dest="weyl_sq", type=float, help="|W|^2 for --d auto")
    energy.add_argument("--manifold", help="catalog key or inline JSON spec for --d auto")
    energy.add_argument("--catalog", help="manifold catalog path")
    add_common_arguments(energy)
    energy.set_defaults(handler=run_energy_check)
