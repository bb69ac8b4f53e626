import csv
import json

import pytest

from app.main import main
from app.services.geometry.curvature import LCFReport, classify


def _report(output_dir, name):
    return json.loads((output_dir / f"{name}.json").read_text())


def test_schedule_run(output_dir, capsys):
    code = main(["schedule", "--dim", "7", "--k", "3", "--output-dir", str(output_dir)])
    report = _report(output_dir, "schedule")

    assert code == 0
    assert report["success"] is True
    assert report["subcommand"] == "schedule"
    assert report["data"]["thetas"] == ["2", "10", "50"]
    assert report["data"]["gammas"] == ["1/2", "9/2", "49/2"]
    assert report["config"]["dim"] == 7
    assert json.loads(capsys.readouterr().out) == report


def test_reruns_write_identical_bytes(output_dir):
    args = ["constants", "--dim", "7", "--output-dir", str(output_dir)]

    assert main(args) == 0
    first = (output_dir / "constants.json").read_bytes()
    assert main(args) == 0
    assert (output_dir / "constants.json").read_bytes() == first


def test_report_name_override(output_dir):
    main(["schedule", "--dim", "8", "--output-dir", str(output_dir), "--report-name", "n8"])

    assert _report(output_dir, "n8")["data"]["dim"] == 8


@pytest.mark.parametrize("args", [
    ["sweep-interaction", "--eps-lo", "1e-3", "--eps-hi", "1e-6"],
    ["sweep-interaction", "--d", "1", "-1"],
    ["sweep-interaction", "--d", "auto"],
    ["energy-check", "--d", "one", "two"],
    ["maximize", "--dim", "7", "--k", "2"],
])
def test_invalid_configuration_exits_with_two(output_dir, args):
    assert main(args + ["--output-dir", str(output_dir)]) == 2


def test_argument_errors_exit_with_two(capsys):
    assert main(["schedule"]) == 2
    assert main(["no-such-command"]) == 2


def test_sweep_writes_csv_series(output_dir):
    code = main([
        "sweep-interaction", "--eps-lo", "1e-5", "--eps-hi", "1e-3", "--max-points", "6",
        "--threads", "2", "--output-dir", str(output_dir),
    ])
    report = _report(output_dir, "sweep-interaction")
    with open(output_dir / "sweep-interaction.csv", newline="") as f:
        rows = list(csv.DictReader(f))

    assert code in (0, 1)
    assert list(rows[0]) == ["eps", "ratio", "value_mantissa", "value_log10", "model_value"]
    assert len(rows) == 6
    assert float(rows[0]["eps"]) == pytest.approx(1e-3)
    assert all(row["model_value"] for row in rows)
    assert report["data"]["quantity"] == "interaction"


def test_maximize_with_explicit_weyl_norm(output_dir):
    code = main(["maximize", "--dim", "7", "--k", "3", "--weyl-sq", "1.0", "--probes", "200", "--output-dir", str(output_dir)])
    report = _report(output_dir, "maximize")

    assert code == 0
    assert report["success"] is True


def test_failed_computation_leaves_partial_report(output_dir):
    code = main(["weyl", "--manifold", '{"kind": "sphere", "dim": 3}', "--output-dir", str(output_dir)])
    report = _report(output_dir, "weyl")

    assert code == 1
    assert report["success"] is False
    assert report["error"]["type"] == "DimensionTooLow"
    assert "base_point" in report["data"]


def test_symmetry_without_isometry_is_a_config_error(output_dir):
    code = main(["symmetry", "--manifold", "flat_r5", "--output-dir", str(output_dir)])

    assert code == 2
    assert _report(output_dir, "symmetry")["error"]["type"] == "ConfigInvalid"


def test_symmetry_expectation_drives_exit_code(output_dir):
    assert main(["symmetry", "--manifold", "s2_shear", "--output-dir", str(output_dir)]) == 0
    assert main(["symmetry", "--manifold", "s2_warped_s3_odd", "--samples", "4", "--output-dir", str(output_dir)]) == 0


def _weyl_samples(values):
    return LCFReport(
        dim=7,
        points=len(values),
        tol=1e-6,
        is_flat_candidate=max(values) <= 1e-6,
        max_weyl=max(values),
        min_weyl=min(values),
        classification=classify(max(values), min(values)),
        values=values,
    )


def test_non_flat_expectation_needs_every_sample(output_dir, monkeypatch):
    monkeypatch.setattr("app.routes.geometry_router.lcf_check", lambda chart, samples, tol=None: _weyl_samples([1.0, 0.0]))

    code = main(["weyl", "--manifold", "s3_x_s4", "--output-dir", str(output_dir)])
    report = _report(output_dir, "weyl")

    assert code == 1
    assert report["data"]["passed"] is False
    assert report["data"]["lcf"]["min_weyl"] == 0.0


def test_not_flat_expectation_needs_one_sample(output_dir, monkeypatch):
    monkeypatch.setattr("app.routes.geometry_router.lcf_check", lambda chart, samples, tol=None: _weyl_samples([1.0, 0.0]))

    assert main(["weyl", "--manifold", "ellipsoid_4", "--output-dir", str(output_dir)]) == 0


def test_short_eps_range_is_reported_before_sweeping(output_dir, monkeypatch):
    def fail(*args, **kwargs):
        raise AssertionError("sweep should not start")

    monkeypatch.setattr("app.routes.tower_router.run_sweep", fail)
    code = main(["sweep-interaction", "--eps-lo", "1e-4", "--eps-hi", "2e-4", "--output-dir", str(output_dir)])

    assert code == 2
    assert _report(output_dir, "sweep-interaction")["error"]["details"]["fitted"] == 3
