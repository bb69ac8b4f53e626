"""
`constants` and `schedule` subcommands.
"""
from typing import Any, Dict

from app.core.exceptions import ConfigInvalid
from app.core.logging_config import get_logger
from app.routes.common import Outcome, RunConfig, add_common_arguments
from app.services.energy.constants import get_constants, interaction_prefactor
from app.services.energy.schedule import check_exponent_identities, exponent_schedule

logger = get_logger(__name__)


def _require_dim(config: RunConfig) -> int:
    if config.dim is None:
        raise ConfigInvalid(f"{config.subcommand} needs --dim")
    return config.dim


def run_constants(config: RunConfig, partial: Dict[str, Any]) -> Outcome:
    """Every reduced-energy constant for dimension N with the convention report."""
    dim = _require_dim(config)
    consts = get_constants(dim)
    data = consts.model_dump(mode="json")
    partial.update(data)
    data["interaction_prefactor"] = interaction_prefactor(dim).model_dump(mode="json")
    logger.info(
        "Constants computed",
        extra={"dim": dim, "kn_pow": consts.kn_pow, "c0": consts.c0, "b_agrees": consts.b_agrees},
    )
    return Outcome(data=data, passed=consts.b_agrees and consts.c0 > 0.0)


def run_schedule(config: RunConfig, partial: Dict[str, Any]) -> Outcome:
    """gamma_j / theta_l table with the exact exponent identities checked."""
    dim = _require_dim(config)
    k = config.k or 3
    schedule = exponent_schedule(dim, k)
    identities = check_exponent_identities(dim, k)
    data = {
        "dim": dim,
        "k": k,
        "gammas": [str(g) for g in schedule.gammas],
        "thetas": [str(t) for t in schedule.thetas],
        "error_rates": [str(e) for e in schedule.error_rates],
        "table": schedule.table(),
        "identities_hold": identities,
    }
    return Outcome(data=data, passed=identities)


def register(subparsers) -> None:
    constants = subparsers.add_parser("constants", help="dump A_N, B_N, C_N, D_N, K_N^-N, c0 and the convention report")
    constants.add_argument("--dim", type=int, required=True, help="dimension N >= 7")
    add_common_arguments(constants)
    constants.set_defaults(handler=run_constants)

    schedule = subparsers.add_parser("schedule", help="exponent table gamma_j, theta_l")
    schedule.add_argument("--dim", type=int, required=True, help="dimension N >= 7")
    schedule.add_argument("--k", type=int, default=3, help="number of levels")
    add_common_arguments(schedule)
    schedule.set_defaults(handler=run_schedule)
