"""
Command-line entry point: ``python -m app.main <subcommand> [options]``.

Every run writes ``<output-dir>/<report-name>.json`` (plus a CSV series for
sweeps) and prints the JSON report on stdout. Exit status is 0 when the run's
checks pass, 1 when they fail or a computation breaks, and 2 for an invalid
configuration.
"""
import argparse
import json
import sys
from typing import Any, Dict, List, Optional

from app.core.config import APP_NAME, APP_VERSION, LOG_JSON, LOG_LEVEL
from app.core.exceptions import TowerError
from app.core.logging_config import get_logger, setup_logging
from app.routes import accept_router, constants_router, geometry_router, reduced_router, tower_router
from app.routes.common import RunConfig, build_report, config_from_args, emit

logger = get_logger(__name__)

ROUTERS = (constants_router, tower_router, reduced_router, geometry_router, accept_router)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=APP_NAME, description="Bubble-tower approximations for the perturbed Yamabe equation.")
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING, ERROR (default: LOG_LEVEL)")
    subparsers = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    for router in ROUTERS:
        router.register(subparsers)
    return parser


def _write_failure(config: RunConfig, partial: Dict[str, Any], error: Dict[str, Any]) -> None:
    try:
        emit(build_report(config, partial or None, False, error=error), config)
    except OSError as exc:
        logger.error(f"Could not write partial report: {exc}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    # Setup logging first
    setup_logging(log_level=args.log_level or LOG_LEVEL, json_output=LOG_JSON)
    logger.info(f"Starting {APP_NAME} v{APP_VERSION}", extra={"subcommand": args.subcommand})

    config: Optional[RunConfig] = None
    partial: Dict[str, Any] = {}
    try:
        config = config_from_args(args)
        outcome = args.handler(config, partial)
    except TowerError as exc:
        logger.error(
            f"{type(exc).__name__}: {exc.message}",
            extra={"subcommand": args.subcommand, "exit_code": exc.exit_code, "details": exc.details},
        )
        if config is not None:
            _write_failure(config, partial, {"type": type(exc).__name__, "message": exc.message, "details": exc.details})
        return exc.exit_code
    except Exception as exc:
        logger.error(f"Unhandled error in {args.subcommand}: {exc}", exc_info=True)
        if config is not None:
            _write_failure(config, partial, {"type": type(exc).__name__, "message": str(exc)})
        return 1

    report = build_report(config, outcome.data, outcome.passed)
    emit(report, config, outcome.rows)
    print(json.dumps(report.model_dump(), indent=2, sort_keys=True, default=str))
    logger.info("Run finished", extra={"subcommand": args.subcommand, "success": outcome.passed})
    return 0 if outcome.passed else 1


if __name__ == "__main__":
    sys.exit(main())
