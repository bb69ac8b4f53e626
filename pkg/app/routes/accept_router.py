"""
`accept` subcommand: the acceptance suite, aggregated.
"""
from typing import Any, Dict

from app.routes.common import Outcome, RunConfig, add_common_arguments
from app.services.acceptance.evaluator import AcceptanceEvaluator, get_profile


def run_accept(config: RunConfig, partial: Dict[str, Any]) -> Outcome:
    profile = get_profile(config.profile)
    report = AcceptanceEvaluator().run(profile)
    return Outcome(data=report.model_dump(mode="json"), passed=report.passed)


def register(subparsers) -> None:
    parser = subparsers.add_parser("accept", help="run every acceptance criterion")
    parser.add_argument("--profile", choices=["quick", "full"], default="quick", help="quick caps sweeps at 12 eps points and k <= 3")
    add_common_arguments(parser)
    parser.set_defaults(handler=run_accept)
