import importlib
import json
import logging

import pytest

from app.core import exceptions
from app.core.exceptions import ComputationFailed, ConfigInvalid, ConfigurationError, DegenerateWeyl, TowerError
from app.core.logging_config import JSONFormatter


def _reload_config():
    import app.core.config as config

    return importlib.reload(config)


def test_config_defaults(clean_env):
    config = _reload_config()

    assert config.APP_NAME == "yamabe-towers"
    assert config.QUAD_REL_TOL == 1e-10
    assert config.SWEEP_REL_TOL == 1e-8
    assert config.TOWER_THREADS == 0
    assert config.CUTOFF_PROFILE == "smoothstep_quintic"
    assert config.MANIFOLD_CATALOG.endswith("manifolds.json")


def test_config_reads_environment(clean_env):
    clean_env.setenv("QUAD_REL_TOL", "1e-6")
    clean_env.setenv("TOWER_THREADS", "3")
    clean_env.setenv("LOG_JSON", "TRUE")
    config = _reload_config()

    assert config.QUAD_REL_TOL == 1e-6
    assert config.TOWER_THREADS == 3
    assert config.LOG_JSON is True


@pytest.mark.parametrize(
    "name, value",
    [
        ("QUAD_REL_TOL", "tight"),
        ("QUAD_REL_TOL", "2.0"),
        ("QUAD_MAX_PANELS", "0"),
        ("CUTOFF_PROFILE", "gaussian"),
        ("WEYL_ZERO_THRESHOLD", "0.5"),
    ],
)
def test_invalid_config_raises(clean_env, name, value):
    clean_env.setenv(name, value)

    with pytest.raises(ConfigurationError) as exc:
        _reload_config()

    assert exc.value.exit_code == 2


def test_exit_codes():
    assert ConfigInvalid("bad").exit_code == 2
    assert ComputationFailed("broken").exit_code == 1
    assert DegenerateWeyl("flat point").exit_code == 1
    assert isinstance(DegenerateWeyl("x"), ComputationFailed)
    assert TowerError("x", details=None).details == {}


def test_every_numerical_error_is_a_computation_failure():
    numerical = [
        exceptions.NonIntegrable,
        exceptions.ToleranceNotReached,
        exceptions.UnsupportedDegree,
        exceptions.SymmetryViolation,
        exceptions.DimensionTooLow,
        exceptions.NonMonotoneScales,
        exceptions.IndexOutOfRange,
        exceptions.NonPositiveValue,
        exceptions.DegenerateWeyl,
        exceptions.StepTooSmall,
        exceptions.SingularMetric,
        exceptions.OutOfDomain,
        exceptions.FixedPointViolation,
    ]
    for cls in numerical:
        assert issubclass(cls, ComputationFailed)


def test_tolerance_not_reached_keeps_best_estimate():
    exc = exceptions.ToleranceNotReached("budget", best_estimate=1.5, details={"panels": 10})

    assert exc.best_estimate == 1.5
    assert exc.details == {"panels": 10}


def test_json_formatter_includes_extra_fields():
    record = logging.LogRecord("app.test", logging.INFO, __file__, 10, "Sweep finished", None, None)
    record.points = 12
    record.level_index = 2

    payload = json.loads(JSONFormatter().format(record))

    assert payload["message"] == "Sweep finished"
    assert payload["level"] == "INFO"
    assert payload["points"] == 12
    assert payload["level_index"] == 2
