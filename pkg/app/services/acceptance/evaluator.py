"""
Acceptance orchestrator.
"""
import time
from typing import List, Optional

from app.core.exceptions import ConfigInvalid, TowerError
from app.core.logging_config import get_logger
from app.services.acceptance.base import (
    PROFILES,
    AcceptanceProfile,
    AcceptanceReport,
    BaseCriterion,
    CriterionResult,
)
from app.services.acceptance.criteria import default_criteria

logger = get_logger(__name__)


def get_profile(name: str) -> AcceptanceProfile:
    if name not in PROFILES:
        raise ConfigInvalid(f"unknown acceptance profile: {name}", details={"available": sorted(PROFILES)})
    return PROFILES[name]


class AcceptanceEvaluator:
    """
    Runs every criterion and aggregates pass/fail.
    """

    def __init__(self, criteria: Optional[List[BaseCriterion]] = None):
        """
        Args:
            criteria: criteria to run, in order (defaults to the full suite)
        """
        self.criteria = criteria if criteria is not None else default_criteria()
        logger.info("Initialized acceptance evaluator", extra={"criteria": len(self.criteria)})

    def evaluate_single(self, criterion: BaseCriterion, profile: AcceptanceProfile) -> CriterionResult:
        """Run one criterion; an exception marks it failed instead of aborting the suite."""
        started = time.perf_counter()
        try:
            result = criterion.evaluate(profile)
        except TowerError as e:
            logger.error(
                f"Criterion {criterion.get_criterion_name()} raised {type(e).__name__}: {e.message}",
                extra={"details": e.details},
            )
            result = criterion.result(False, error=type(e).__name__, message=e.message, error_details=e.details)
        except Exception as e:
            logger.error(f"Error evaluating {criterion.get_criterion_name()}: {e}", exc_info=True)
            result = criterion.result(False, error=type(e).__name__, message=str(e))

        logger.info(
            "Criterion evaluated",
            extra={
                "criterion": result.criterion,
                "passed": result.passed,
                "seconds": round(time.perf_counter() - started, 3),
            },
        )
        return result

    def run(self, profile: AcceptanceProfile) -> AcceptanceReport:
        logger.info("Starting acceptance run", extra={"profile": profile.name, "criteria": len(self.criteria)})
        results = [self.evaluate_single(criterion, profile) for criterion in self.criteria]
        failed = [r.criterion for r in results if not r.passed]
        report = AcceptanceReport(
            profile=profile.name,
            total=len(results),
            failed=failed,
            passed=not failed,
            results=results,
        )
        logger.info(
            "Acceptance run complete",
            extra={"profile": profile.name, "passed": report.passed, "failed": failed},
        )
        return report
