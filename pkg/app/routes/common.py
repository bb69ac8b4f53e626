"""
Run configuration and report emission shared by every subcommand.
"""
import argparse
import csv
import json
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.core.config import APP_NAME, APP_VERSION, OUTPUT_DIR
from app.core.exceptions import ConfigInvalid
from app.core.logging_config import get_logger
from app.core.responses import RunReport
from app.services.geometry.catalog import ManifoldEntry, get_entry, load_catalog
from app.services.geometry.curvature import curvature_at
from app.services.reduced.maximize import maximize_sequential
from app.services.reduced.model import build_reduced_model

logger = get_logger(__name__)

CSV_COLUMNS = ["eps", "ratio", "value_mantissa", "value_log10", "model_value"]


class RunConfig(BaseModel):
    """Validated configuration of one CLI run; embedded verbatim in its report."""
    model_config = ConfigDict(frozen=True)

    subcommand: str
    dim: Optional[int] = Field(None, ge=1, description="Dimension N")
    k: Optional[int] = Field(None, ge=1, description="Number of bubbles")
    d: Optional[Union[Literal["auto"], List[float]]] = Field(None, description="Tower heights, or 'auto'")
    eps: Optional[float] = Field(None, gt=0.0, description="Perturbation size")
    eps_lo: Optional[float] = Field(None, gt=0.0, description="Smallest eps of a sweep")
    eps_hi: Optional[float] = Field(None, gt=0.0, description="Largest eps of a sweep")
    per_decade: int = Field(8, ge=1, description="Sweep points per decade of eps")
    max_points: Optional[int] = Field(None, ge=4, description="Cap on sweep points")
    level: int = Field(2, ge=2, description="Tower level l of the measured quantity")
    quantity: Optional[Literal["interaction", "annulus-norm", "error"]] = None
    r0: Optional[float] = Field(None, gt=0.0, description="Cutoff radius")
    tolerance: Optional[float] = Field(None, gt=0.0, description="Pass threshold override")
    manifold: Optional[str] = Field(None, description="Catalog key or inline JSON manifold spec")
    catalog: Optional[str] = Field(None, description="Manifold catalog path")
    weyl_sq: Optional[float] = Field(None, ge=0.0, description="|W(xi)|^2")
    coefficients: Literal["closed_form", "quadrature"] = "closed_form"
    hessian_eps: float = Field(1e-3, gt=0.0, lt=1.0)
    probes: int = Field(0, ge=0)
    samples: Optional[int] = Field(None, ge=1)
    weyl_points: int = Field(0, ge=0)
    profile: Literal["quick", "full"] = "quick"
    threads: Optional[int] = Field(None, ge=0)
    seed: Optional[int] = None
    output_dir: str = OUTPUT_DIR
    report_name: Optional[str] = None

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        if self.d == "auto" and self.manifold is None and self.weyl_sq is None:
            raise ValueError("d = 'auto' needs a manifold or an explicit weyl_sq")
        if isinstance(self.d, list):
            if any(h <= 0.0 for h in self.d):
                raise ValueError("tower heights must be positive")
            if self.k is not None and len(self.d) != self.k:
                raise ValueError(f"expected {self.k} heights, got {len(self.d)}")
        if self.eps_lo is not None and self.eps_hi is not None and not self.eps_lo < self.eps_hi:
            raise ValueError("eps_lo must be below eps_hi")
        return self

    @property
    def name(self) -> str:
        return self.report_name or self.subcommand

    def snapshot(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """RunConfig from parsed arguments; validation errors become ConfigInvalid."""
    raw = {key: value for key, value in vars(args).items() if key in RunConfig.model_fields and value is not None}
    if "d" in raw:
        raw["d"] = parse_heights(raw["d"])
    try:
        return RunConfig(**raw)
    except ValidationError as exc:
        raise ConfigInvalid(
            "invalid run configuration",
            details={"errors": [{"field": ".".join(map(str, e["loc"])), "message": e["msg"]} for e in exc.errors()]},
        )


def parse_heights(values: List[str]) -> Union[str, List[float]]:
    if list(values) == ["auto"]:
        return "auto"
    try:
        return [float(v) for v in values]
    except ValueError:
        raise ConfigInvalid("heights must be numbers or the single word 'auto'", details={"d": list(values)})


def resolve_entry(config: RunConfig) -> ManifoldEntry:
    """Catalog entry for ``config.manifold``; an inline JSON spec becomes an ad-hoc entry."""
    if config.manifold is None:
        raise ConfigInvalid(f"{config.subcommand} needs --manifold")
    text = config.manifold.strip()
    if text.startswith("{"):
        try:
            spec = json.loads(text)
            entry = ManifoldEntry(**spec) if "manifold" in spec else ManifoldEntry(manifold=spec)
        except (json.JSONDecodeError, ValidationError, TypeError) as exc:
            raise ConfigInvalid("inline manifold spec is malformed", details={"error": str(exc)})
    else:
        catalog = load_catalog(config.catalog) if config.catalog else None
        entry = get_entry(text, catalog)
    update: Dict[str, Any] = {} if config.seed is None else {"seed": config.seed}
    if config.samples is not None:
        update["samples"] = config.samples
    return entry.model_copy(update=update) if update else entry


def entry_base_point(entry: ManifoldEntry, chart) -> np.ndarray:
    return np.asarray(entry.fixed_point, dtype=float) if entry.fixed_point else chart.center


class Outcome(BaseModel):
    """What a subcommand handler hands back to the dispatcher."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    data: Dict[str, Any]
    passed: bool = True
    rows: Optional[List[Dict[str, str]]] = None


Handler = Callable[[RunConfig, Dict[str, Any]], Outcome]


def build_report(config: RunConfig, data: Optional[Dict[str, Any]], success: bool, error: Optional[Dict[str, Any]] = None) -> RunReport:
    return RunReport(
        success=success,
        service=APP_NAME,
        version=APP_VERSION,
        subcommand=config.subcommand,
        config=config.snapshot(),
        data=data,
        error=error,
    )


def write_json(report: RunReport, path: Path) -> Path:
    """Sorted keys and no timestamps: identical runs write identical bytes."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(report.model_dump(), f, indent=2, sort_keys=True, default=str)
        f.write("\n")
    return path


def write_csv(rows: List[Dict[str, str]], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return path


def emit(report: RunReport, config: RunConfig, rows: Optional[List[Dict[str, str]]] = None) -> Dict[str, str]:
    """Write the JSON report (and CSV series, if any) under ``config.output_dir``."""
    out = Path(config.output_dir)
    written = {"json": str(write_json(report, out / f"{config.name}.json"))}
    if rows is not None:
        written["csv"] = str(write_csv(rows, out / f"{config.name}.csv"))
    logger.info("Report written", extra={"subcommand": config.subcommand, "files": written})
    return written


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output-dir", dest="output_dir", help="report directory (default: OUTPUT_DIR)")
    parser.add_argument("--report-name", dest="report_name", help="report file stem (default: subcommand)")
    parser.add_argument("--seed", type=int, help="seed for sampled points and probes")


def resolve_weyl_sq(config: RunConfig, dim: int) -> Dict[str, Any]:
    """|W(xi)|^2 from the config, or computed at the manifold's base point."""
    if config.weyl_sq is not None:
        return {"weyl_sq": config.weyl_sq, "source": "explicit"}
    entry = resolve_entry(config)
    chart = entry.chart()
    if chart.dim != dim:
        raise ConfigInvalid("manifold dimension does not match --dim", details={"manifold_dim": chart.dim, "dim": dim})
    point = entry_base_point(entry, chart)
    weyl_sq = curvature_at(chart, point).weyl_norm_sq
    logger.info("Weyl norm taken from manifold", extra={"manifold": config.manifold, "weyl_sq": weyl_sq})
    return {"weyl_sq": weyl_sq, "source": "manifold", "manifold": config.manifold, "point": point.tolist()}


def resolve_heights(config: RunConfig, dim: int, k: int) -> List[float]:
    """Explicit heights, all ones by default, or the reduced-energy maximizer for 'auto'."""
    if config.d is None:
        return [1.0] * k
    if config.d != "auto":
        return list(config.d)
    weyl = resolve_weyl_sq(config, dim)
    model = build_reduced_model(dim, k, weyl["weyl_sq"], coefficient_source=config.coefficients)
    d_star, _ = maximize_sequential(model)
    return d_star
