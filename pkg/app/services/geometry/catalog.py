"""
Manifold catalog: JSON descriptions of charts, products and isometries.

A manifold spec is one of

    {"kind": "sphere", "dim": n, "radius": r, "chart": "graph" | "angles"}
    {"kind": "ellipsoid", "axes": [a_1, ..., a_{n+1}], "chart": "graph" | "angles"}
    {"kind": "flat", "dim": n, "half_width": w}
    {"kind": "product", "factors": [spec, ...]}
    {"kind": "warped", "base": spec, "fiber": spec, "warping": {...Warping fields}}

and an isometry spec one of

    {"kind": "reflection"}
    {"kind": "shear", "amount": s}
    {"kind": "product", "factors": [isometry, ...]}   (one per leaf chart)
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.core.config import MANIFOLD_CATALOG
from app.core.exceptions import ConfigInvalid
from app.core.logging_config import get_logger
from app.services.geometry.base import FlatBox, ManifoldChart
from app.services.geometry.charts import EllipsoidAngles, EllipsoidGraph, sphere_angles, sphere_graph
from app.services.geometry.curvature import Expectation
from app.services.geometry.symmetry import CoordinateMap, product_map, reflection, shear
from app.services.geometry.warped import Warping, WarpedProductSpec, product

logger = get_logger(__name__)


class ManifoldEntry(BaseModel):
    """One catalog entry: a manifold plus how to sample and what to expect."""
    model_config = ConfigDict(frozen=True)

    description: str = ""
    manifold: Dict[str, Any]
    samples: int = Field(20, ge=1)
    seed: int = 0
    expect: Optional[Expectation] = None
    isometry: Optional[Dict[str, Any]] = None
    fixed_point: Optional[List[float]] = None
    expect_symmetric: Optional[bool] = None
    sample_shrink: float = Field(0.8, gt=0.0, le=1.0)

    def chart(self) -> ManifoldChart:
        return build_chart(self.manifold)

    def points(self, chart: Optional[ManifoldChart] = None) -> np.ndarray:
        chart = chart or self.chart()
        return chart.sample(np.random.default_rng(self.seed), self.samples, self.sample_shrink)


def _require(spec: Dict[str, Any], key: str):
    if key not in spec:
        raise ConfigInvalid(f"manifold spec is missing '{key}'", details={"spec": spec})
    return spec[key]


def build_chart(spec: Dict[str, Any]) -> ManifoldChart:
    """Chart described by a (possibly nested) manifold spec."""
    kind = _require(spec, "kind")
    chart_kind = spec.get("chart", "graph")
    if chart_kind not in ("graph", "angles"):
        raise ConfigInvalid("chart must be 'graph' or 'angles'", details={"chart": chart_kind})

    if kind == "sphere":
        dim = int(_require(spec, "dim"))
        radius = float(spec.get("radius", 1.0))
        if dim == 1 or chart_kind == "angles":
            return sphere_angles(dim, radius)
        return sphere_graph(dim, radius)
    if kind == "ellipsoid":
        axes = _require(spec, "axes")
        return EllipsoidAngles(axes) if chart_kind == "angles" else EllipsoidGraph(axes)
    if kind == "flat":
        return FlatBox(int(_require(spec, "dim")), float(spec.get("half_width", 1.0)))
    if kind == "product":
        return product([build_chart(factor) for factor in _require(spec, "factors")])
    if kind == "warped":
        try:
            warping = Warping(**spec.get("warping", {}))
        except ValidationError as exc:
            raise ConfigInvalid("invalid warping function", details={"errors": exc.errors()})
        return WarpedProductSpec(build_chart(_require(spec, "base")), build_chart(_require(spec, "fiber")), warping)
    raise ConfigInvalid(f"unknown manifold kind: {kind}", details={"spec": spec})


def build_isometry(spec: Dict[str, Any], chart: ManifoldChart, center: Optional[np.ndarray] = None) -> CoordinateMap:
    """Coordinate map described by an isometry spec, centered at ``center``."""
    kind = _require(spec, "kind")
    center = chart.center if center is None else np.asarray(center, dtype=float)
    if kind == "reflection":
        return reflection(center)
    if kind == "shear":
        if chart.dim < 2:
            raise ConfigInvalid("a shear needs at least two coordinates", details={"dim": chart.dim})
        return shear(center, float(spec.get("amount", 0.5)))
    if kind == "product":
        leaves = chart.factors()
        factors = _require(spec, "factors")
        if len(factors) != len(leaves):
            raise ConfigInvalid(
                "product isometry needs one factor map per leaf chart",
                details={"maps": len(factors), "leaves": len(leaves)},
            )
        dims = [leaf.dim for leaf in leaves]
        edges = np.cumsum([0] + dims)
        maps = [
            build_isometry(factor, leaf, center[a:b])
            for factor, leaf, a, b in zip(factors, leaves, edges[:-1], edges[1:])
        ]
        return product_map(maps, dims)
    raise ConfigInvalid(f"unknown isometry kind: {kind}", details={"spec": spec})


def load_catalog(path: Optional[str] = None) -> Dict[str, ManifoldEntry]:
    path = Path(path or MANIFOLD_CATALOG)
    if not path.exists():
        raise ConfigInvalid("manifold catalog not found", details={"path": str(path)})
    try:
        raw = json.loads(path.read_text())
        catalog = {name: ManifoldEntry(**entry) for name, entry in raw.items()}
    except (json.JSONDecodeError, ValidationError, TypeError) as exc:
        raise ConfigInvalid("manifold catalog is malformed", details={"path": str(path), "error": str(exc)})
    logger.info("Loaded manifold catalog", extra={"path": str(path), "entries": len(catalog)})
    return catalog


# Catalog loaded from MANIFOLD_CATALOG
_catalog: Optional[Dict[str, ManifoldEntry]] = None


def get_catalog() -> Dict[str, ManifoldEntry]:
    """Get or load the default catalog (singleton pattern)."""
    global _catalog
    if _catalog is None:
        _catalog = load_catalog()
    return _catalog


def reset_catalog() -> None:
    """Drop the cached catalog (useful for testing)."""
    global _catalog
    _catalog = None


def get_entry(name: str, catalog: Optional[Dict[str, ManifoldEntry]] = None) -> ManifoldEntry:
    catalog = catalog if catalog is not None else get_catalog()
    if name not in catalog:
        raise ConfigInvalid(f"unknown manifold: {name}", details={"available": sorted(catalog)})
    return catalog[name]
