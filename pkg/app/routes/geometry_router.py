"""
`weyl` and `symmetry` subcommands over catalog manifolds.
"""
from typing import Any, Dict

from app.core.exceptions import ConfigInvalid
from app.core.logging_config import get_logger
from app.routes.common import Outcome, RunConfig, add_common_arguments, entry_base_point, resolve_entry
from app.services.bubbles.solvability import solvability_report
from app.services.geometry.catalog import build_isometry
from app.services.geometry.curvature import curvature_at, lcf_check, meets_expectation
from app.services.geometry.symmetry import SYMMETRY_TOLERANCE, symmetry_check

logger = get_logger(__name__)


def run_weyl(config: RunConfig, partial: Dict[str, Any]) -> Outcome:
    """Sampled |W|^2 with the catalog expectation, plus full curvature at the base point."""
    entry = resolve_entry(config)
    chart = entry.chart()
    base = curvature_at(chart, entry_base_point(entry, chart))
    data: Dict[str, Any] = {
        "manifold": config.manifold,
        "description": entry.description,
        "expect": entry.expect,
        "base_point": base.model_dump(mode="json"),
    }
    partial.update(data)
    if chart.dim >= 5:
        data["solvability"] = solvability_report(base.to_curvature_data()).model_dump(mode="json")

    report = lcf_check(chart, entry.points(chart), tol=config.tolerance)
    data["lcf"] = report.model_dump(mode="json")
    passed = meets_expectation(report, entry.expect)
    data["passed"] = passed
    return Outcome(data=data, passed=passed)


def run_symmetry(config: RunConfig, partial: Dict[str, Any]) -> Outcome:
    """Point-symmetry check of the entry's isometry at its fixed point."""
    entry = resolve_entry(config)
    if entry.isometry is None:
        raise ConfigInvalid("manifold entry declares no isometry", details={"manifold": config.manifold})
    chart = entry.chart()
    fixed = entry_base_point(entry, chart)
    partial.update({"manifold": config.manifold, "fixed_point": fixed.tolist()})

    report = symmetry_check(
        chart,
        build_isometry(entry.isometry, chart, fixed),
        fixed,
        entry.points(chart),
        tol=config.tolerance if config.tolerance is not None else SYMMETRY_TOLERANCE,
        weyl_points=config.weyl_points,
    )
    expected = entry.expect_symmetric
    passed = report.passed if expected is None else report.passed == expected
    data = {
        "manifold": config.manifold,
        "description": entry.description,
        "isometry": entry.isometry,
        "expect_symmetric": expected,
        "symmetry": report.model_dump(mode="json"),
        "passed": passed,
    }
    return Outcome(data=data, passed=passed)


def _manifold_arguments(parser) -> None:
    parser.add_argument("--manifold", required=True, help="catalog key or inline JSON spec")
    parser.add_argument("--catalog", help="manifold catalog path (default: MANIFOLD_CATALOG)")
    parser.add_argument("--samples", type=int, help="sample count override")
    parser.add_argument("--tolerance", type=float, help="pass threshold override")
    add_common_arguments(parser)


def register(subparsers) -> None:
    weyl = subparsers.add_parser("weyl", help="sampled |W|^2 and local conformal flatness")
    _manifold_arguments(weyl)
    weyl.set_defaults(handler=run_weyl)

    symmetry = subparsers.add_parser("symmetry", help="point-symmetry check of a catalog isometry")
    symmetry.add_argument("--weyl-points", dest="weyl_points", type=int, help="samples where |W|^2 invariance is compared")
    _manifold_arguments(symmetry)
    symmetry.set_defaults(handler=run_symmetry)
