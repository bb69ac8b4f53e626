import pytest

from app.core.exceptions import ConfigInvalid, DegenerateWeyl
from app.services.acceptance.base import PROFILES, BaseCriterion
from app.services.acceptance.criteria import ExponentAlgebraCriterion, GeometryOracleCriterion, default_criteria
from app.services.acceptance.evaluator import AcceptanceEvaluator, get_profile
from app.services.geometry.curvature import LCFReport, classify


class StubCriterion(BaseCriterion):
    def __init__(self, name, outcome):
        self.name = name
        self.outcome = outcome

    def get_criterion_name(self):
        return self.name

    def evaluate(self, profile):
        if isinstance(self.outcome, Exception):
            raise self.outcome
        return self.result(self.outcome, profile=profile.name)


def test_all_passing_criteria():
    report = AcceptanceEvaluator([StubCriterion("a", True), StubCriterion("b", True)]).run(PROFILES["quick"])

    assert report.passed
    assert report.total == 2
    assert report.failed == []
    assert report.results[0].details == {"profile": "quick"}


def test_failures_are_collected_in_order():
    criteria = [
        StubCriterion("first", False),
        StubCriterion("second", True),
        StubCriterion("third", DegenerateWeyl("no maximum", details={"weyl_sq": 0.0})),
        StubCriterion("fourth", RuntimeError("boom")),
    ]
    report = AcceptanceEvaluator(criteria).run(PROFILES["full"])

    assert not report.passed
    assert report.failed == ["first", "third", "fourth"]
    assert report.results[2].details["error"] == "DegenerateWeyl"
    assert report.results[2].details["error_details"] == {"weyl_sq": 0.0}
    assert report.results[3].details["message"] == "boom"


def test_profiles():
    assert get_profile("quick").max_eps_points == 12
    assert get_profile("quick").max_k == 3
    assert get_profile("full").max_eps_points is None
    with pytest.raises(ConfigInvalid):
        get_profile("slow")


def test_default_suite_is_numbered():
    criteria = default_criteria()

    assert [c.number for c in criteria] == list(range(1, 12))
    assert len({c.get_criterion_name() for c in criteria}) == 11


def test_exponent_algebra_criterion():
    result = ExponentAlgebraCriterion().evaluate(PROFILES["quick"])

    assert result.passed
    assert result.details["theta_n7"] == ["2", "10", "50"]


def test_geometry_oracle_samples_twenty_points_in_quick_profile(monkeypatch):
    seen = {}
    values = [1.0] * 19 + [0.0]

    def fake_lcf_check(chart, samples, tol=None):
        seen[chart.dim] = seen.get(chart.dim, []) + [len(samples)]
        return LCFReport(
            dim=chart.dim,
            points=len(samples),
            tol=1e-6,
            is_flat_candidate=False,
            max_weyl=max(values),
            min_weyl=min(values),
            classification=classify(max(values), min(values)),
            values=values,
        )

    monkeypatch.setattr("app.services.acceptance.criteria.lcf_check", fake_lcf_check)
    result = GeometryOracleCriterion().evaluate(PROFILES["quick"])
    manifolds = result.details["manifolds"]

    assert all(count == 20 for counts in seen.values() for count in counts)
    assert all(entry["points"] == 20 for entry in manifolds.values())
    assert manifolds["s3_x_s4"]["passed"] is False
    assert manifolds["ellipsoid_4"]["passed"] is True
    assert not result.passed
