"""
Point-symmetry verification.

A map H is a point symmetry at p when it is an isometry (dH^T g(H(u)) dH = g(u))
fixing p with dH_p = -Id. Both conditions are checked numerically; the
differential of H comes from fourth-order central differences.
"""
from typing import Callable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.exceptions import ConfigInvalid, FixedPointViolation
from app.core.logging_config import get_logger
from app.services.geometry.base import ManifoldChart
from app.services.geometry.curvature import MACHINE_EPS, curvature_at

logger = get_logger(__name__)

CoordinateMap = Callable[[np.ndarray], np.ndarray]

FIXED_POINT_TOLERANCE = 1e-10
SYMMETRY_TOLERANCE = 1e-8
FIRST_STENCIL = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])


def reflection(center: Sequence[float]) -> CoordinateMap:
    """u -> 2c - u."""
    c = np.asarray(center, dtype=float)
    return lambda u: 2.0 * c - np.asarray(u, dtype=float)


def shear(center: Sequence[float], amount: float, source: int = 1, target: int = 0) -> CoordinateMap:
    """Reflection v = 2c - u, then v[target] -= amount * (u[source] - c[source])."""
    c = np.asarray(center, dtype=float)

    def apply(u):
        u = np.asarray(u, dtype=float)
        v = 2.0 * c - u
        v[target] -= amount * (u[source] - c[source])
        return v

    return apply


def product_map(maps: Sequence[CoordinateMap], dims: Sequence[int]) -> CoordinateMap:
    """(h_1, ..., h_m) acting factorwise on consecutive coordinate blocks."""
    if len(maps) != len(dims):
        raise ConfigInvalid("one map per factor is required", details={"maps": len(maps), "factors": len(dims)})
    edges = np.cumsum([0] + list(dims))

    def apply(u):
        u = np.asarray(u, dtype=float)
        return np.concatenate([h(u[a:b]) for h, a, b in zip(maps, edges[:-1], edges[1:])])

    return apply


def differential(h_map: CoordinateMap, u: np.ndarray, step: float) -> np.ndarray:
    """dH at u, column a holding d H / d u_a."""
    n = u.size
    columns = []
    for a in range(n):
        e = np.zeros(n)
        e[a] = step
        columns.append(sum(c * h_map(u + o * e) for c, o in zip(FIRST_STENCIL, OFFSETS)) / step)
    return np.stack(columns, axis=1)


class SymmetryReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    dim: int
    points: int
    fixed_point: List[float]
    fixed_point_error: float
    max_pullback_defect: float
    differential_defect: float
    weyl_invariance_defect: Optional[float] = None
    tol: float
    passed: bool


def symmetry_check(
    chart: ManifoldChart,
    isometry: CoordinateMap,
    fixed_point: Sequence[float],
    samples: Sequence[Sequence[float]],
    fd_step: Optional[float] = None,
    tol: float = SYMMETRY_TOLERANCE,
    weyl_points: int = 0,
) -> SymmetryReport:
    """
    Check that ``isometry`` is a point symmetry of ``chart`` at ``fixed_point``.

    Args:
        chart: chart or warped product
        isometry: coordinate map H, which must send the samples into the chart
        fixed_point: p with H(p) = p
        samples: points where the metric pullback is compared
        fd_step: step for dH (defaults to eps_mach^{1/5} times the chart scale)
        tol: pass threshold for both defects
        weyl_points: number of samples at which |W|^2(u) and |W|^2(H(u)) are compared

    Raises:
        FixedPointViolation: |H(p) - p| > 1e-10
    """
    p = np.asarray(fixed_point, dtype=float)
    chart.check_domain(p)
    image = np.asarray(isometry(p), dtype=float)
    fixed_error = float(np.max(np.abs(image - p)))
    if fixed_error > FIXED_POINT_TOLERANCE:
        raise FixedPointViolation(
            "map does not fix the declared point",
            details={"fixed_point": p.tolist(), "image": image.tolist(), "error": fixed_error},
        )
    if len(samples) == 0:
        raise ConfigInvalid("symmetry_check needs at least one sample point")

    step = MACHINE_EPS ** 0.2 * chart.scale if fd_step is None else fd_step
    chart.check_domain(p, margin=2.0 * step)
    differential_defect = float(np.max(np.abs(differential(isometry, p, step) + np.eye(chart.dim))))

    pullback_defect = 0.0
    weyl_defect = None
    for index, u in enumerate(samples):
        u = np.asarray(u, dtype=float)
        chart.check_domain(u, margin=2.0 * step)
        v = np.asarray(isometry(u), dtype=float)
        chart.check_domain(v)
        dh = differential(isometry, u, step)
        pulled = dh.T @ chart.metric(v) @ dh
        pullback_defect = max(pullback_defect, float(np.max(np.abs(pulled - chart.metric(u)))))
        if index < weyl_points and chart.dim >= 4:
            here = curvature_at(chart, u).weyl_norm_sq
            there = curvature_at(chart, v).weyl_norm_sq
            relative = abs(here - there) / max(abs(here), abs(there), 1.0)
            weyl_defect = relative if weyl_defect is None else max(weyl_defect, relative)

    report = SymmetryReport(
        dim=chart.dim,
        points=len(samples),
        fixed_point=p.tolist(),
        fixed_point_error=fixed_error,
        max_pullback_defect=pullback_defect,
        differential_defect=differential_defect,
        weyl_invariance_defect=weyl_defect,
        tol=tol,
        passed=pullback_defect <= tol and differential_defect <= tol,
    )
    logger.info(
        "Symmetry check finished",
        extra={"dim": chart.dim, "pullback_defect": pullback_defect, "differential_defect": differential_defect, "passed": report.passed},
    )
    return report
