"""
`maximize` subcommand: tower heights maximizing the reduced energy.
"""
from typing import Any, Dict

from app.core.exceptions import ConfigInvalid
from app.core.logging_config import get_logger
from app.routes.common import Outcome, RunConfig, add_common_arguments, resolve_weyl_sq
from app.services.reduced.maximize import hessian_check, maximize_sequential, sequential_probes
from app.services.reduced.model import build_reduced_model

logger = get_logger(__name__)


def run_maximize(config: RunConfig, partial: Dict[str, Any]) -> Outcome:
    """
    Sequential maximization with closed-form / golden-section agreement,
    the scaled Hessian at ``hessian_eps`` and, optionally, random probes.
    """
    if config.dim is None or config.k is None:
        raise ConfigInvalid("maximize needs --dim and --k")
    weyl = resolve_weyl_sq(config, config.dim)
    partial["weyl"] = weyl

    model = build_reduced_model(config.dim, config.k, weyl["weyl_sq"], coefficient_source=config.coefficients)
    d_star, report = maximize_sequential(model)
    partial["maximization"] = report.model_dump(mode="json")

    hessian = hessian_check(model, d_star, config.hessian_eps)
    data: Dict[str, Any] = {
        "weyl": weyl,
        "coefficients": {"source": model.coefficient_source, "A": model.a_n, "B": model.b_n, "C": model.c_n, "D": model.d_n},
        "thetas": [str(t) for t in model.schedule.thetas],
        "d_star": d_star,
        "maximization": report.model_dump(mode="json"),
        "hessian": hessian.model_dump(mode="json"),
    }
    passed = report.agrees and report.all_concave and hessian.negdef
    if config.probes:
        probes = sequential_probes(model, config.probes, seed=config.seed or 0)
        data["probes"] = probes.model_dump(mode="json")
        passed = passed and probes.passed
    data["passed"] = passed
    logger.info(
        "Maximization finished",
        extra={"dim": config.dim, "k": config.k, "agrees": report.agrees, "negdef": hessian.negdef},
    )
    return Outcome(data=data, passed=passed)


def register(subparsers) -> None:
    parser = subparsers.add_parser("maximize", help="maximizing tower heights d* of the reduced energy")
    parser.add_argument("--dim", type=int, required=True, help="dimension N >= 7")
    parser.add_argument("--k", type=int, required=True, help="number of bubbles")
    parser.add_argument("--weyl-sq", dest="weyl_sq", type=float, help="|W(xi)|^2")
    parser.add_argument("--manifold", help="catalog key or inline JSON spec; |W|^2 is taken at its base point")
    parser.add_argument("--catalog", help="manifold catalog path")
    parser.add_argument("--coefficients", choices=["closed_form", "quadrature"], help="closed-form or quadrature B_N, C_N")
    parser.add_argument("--hessian-eps", dest="hessian_eps", type=float, help="eps of the Hessian check (default 1e-3)")
    parser.add_argument("--probes", type=int, help="random probes around d* (0 skips)")
    add_common_arguments(parser)
    parser.set_defaults(handler=run_maximize)
