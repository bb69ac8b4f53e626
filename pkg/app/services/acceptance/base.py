"""
Base acceptance framework.
"""
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict


class AcceptanceProfile(BaseModel):
    """How much work each criterion may spend."""
    model_config = ConfigDict(frozen=True)

    name: Literal["quick", "full"]
    max_eps_points: Optional[int]
    max_k: int
    probes: int = 1000


PROFILES: Dict[str, AcceptanceProfile] = {
    "quick": AcceptanceProfile(name="quick", max_eps_points=12, max_k=3),
    "full": AcceptanceProfile(name="full", max_eps_points=None, max_k=5),
}


class CriterionResult(BaseModel):
    """Outcome of a single acceptance criterion."""
    number: int
    criterion: str
    passed: bool
    details: Optional[Dict[str, Any]] = None


class AcceptanceReport(BaseModel):
    """Complete acceptance run; no timestamps, so reruns are byte-identical."""
    profile: str
    total: int
    failed: List[str]
    passed: bool
    results: List[CriterionResult]


class BaseCriterion(ABC):
    """Base class for acceptance criteria."""

    number: int = 0

    @abstractmethod
    def evaluate(self, profile: AcceptanceProfile) -> CriterionResult:
        """
        Run the check under ``profile``.

        Returns:
            CriterionResult with pass flag and measured values
        """
        pass

    @abstractmethod
    def get_criterion_name(self) -> str:
        """Return the name of this criterion."""
        pass

    def result(self, passed: bool, **details: Any) -> CriterionResult:
        return CriterionResult(
            number=self.number,
            criterion=self.get_criterion_name(),
            passed=bool(passed),
            details=details,
        )
