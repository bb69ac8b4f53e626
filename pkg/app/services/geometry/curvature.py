"""
Curvature of a chart metric by finite differences.

Index conventions: dg[a, i, j] = d_a g_ij, ddg[a, b, i, j] = d_a d_b g_ij,
christoffel[k, i, j] = Gamma^k_{ij}, and R_{ijkl} with all indices down and
R_{ijij} the sectional curvature of the (i, j) plane:

    R_ijkl = 1/2 (d_j d_k g_il + d_i d_l g_jk - d_i d_k g_jl - d_j d_l g_ik)
             + g_pq (Gamma^p_jk Gamma^q_il - Gamma^p_jl Gamma^q_ik)

Ric_jl = g^ik R_ijkl, R = g^jl Ric_jl, and with o the Kulkarni-Nomizu product

    W = Rm - Ric o g / (n-2) + R g o g / (2 (n-1)(n-2)).
"""
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_serializer

from app.core.config import FD_TOLERANCE, WEYL_NONZERO_THRESHOLD, WEYL_ZERO_THRESHOLD
from app.core.exceptions import ConfigInvalid, DimensionTooLow, SymmetryViolation
from app.core.logging_config import get_logger
from app.services.bubbles.curvature_data import (
    CurvatureData,
    from_riemann,
    kulkarni_nomizu,
    symmetry_defects,
)
from app.services.geometry.base import ManifoldChart, check_metric

logger = get_logger(__name__)

MACHINE_EPS = float(np.finfo(float).eps)
FIRST_STENCIL = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
SECOND_STENCIL = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])


def default_step(chart: ManifoldChart) -> float:
    return MACHINE_EPS ** (1.0 / 6.0) * chart.scale


def _symmetric_metric(chart: ManifoldChart, u: np.ndarray) -> np.ndarray:
    g = chart.metric(u)
    return 0.5 * (g + g.T)


def _stencil_derivatives(chart: ManifoldChart, u: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """Fourth-order central first and second derivatives of g at step h."""
    n = chart.dim
    g0 = _symmetric_metric(chart, u)
    dg = np.zeros((n, n, n))
    ddg = np.zeros((n, n, n, n))
    basis = np.eye(n)

    for a in range(n):
        shifted = [_symmetric_metric(chart, u + o * h * basis[a]) for o in OFFSETS]
        dg[a] = sum(c * g for c, g in zip(FIRST_STENCIL, shifted)) / h
        line = [shifted[0], shifted[1], g0, shifted[2], shifted[3]]
        ddg[a, a] = sum(c * g for c, g in zip(SECOND_STENCIL, line)) / h ** 2

    for a in range(n):
        for b in range(a + 1, n):
            mixed = np.zeros((n, n))
            for ca, oa in zip(FIRST_STENCIL, OFFSETS):
                for cb, ob in zip(FIRST_STENCIL, OFFSETS):
                    mixed += ca * cb * _symmetric_metric(chart, u + h * (oa * basis[a] + ob * basis[b]))
            ddg[a, b] = mixed / h ** 2
            ddg[b, a] = ddg[a, b]
    return dg, ddg


def metric_derivatives(chart: ManifoldChart, u: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """Stencil derivatives at h and h/2, combined by one Richardson step."""
    coarse_dg, coarse_ddg = _stencil_derivatives(chart, u, h)
    fine_dg, fine_ddg = _stencil_derivatives(chart, u, 0.5 * h)
    return (16.0 * fine_dg - coarse_dg) / 15.0, (16.0 * fine_ddg - coarse_ddg) / 15.0


def raise_all(tensor: np.ndarray, g_inv: np.ndarray) -> np.ndarray:
    """T^{ijkl} from T_{ijkl}."""
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", tensor, g_inv, g_inv, g_inv, g_inv, optimize=True)


def weyl_tensor(riemann: np.ndarray, ricci: np.ndarray, scalar: float, g: np.ndarray) -> np.ndarray:
    n = g.shape[0]
    if n < 3:
        return np.zeros_like(riemann)
    return (
        riemann
        - kulkarni_nomizu(ricci, g) / (n - 2)
        + scalar * kulkarni_nomizu(g, g) / (2.0 * (n - 1) * (n - 2))
    )


class CurvatureAtPoint(BaseModel):
    """Full curvature package at one chart point; arrays export as nested lists."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    point: np.ndarray
    metric: np.ndarray
    inverse_metric: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    weyl: np.ndarray
    weyl_norm_sq: float
    fd_step: float
    symmetry_defect: float
    weyl_trace_defect: float

    @field_serializer("point", "metric", "inverse_metric", "christoffel", "riemann", "ricci", "weyl")
    def _as_lists(self, value: np.ndarray) -> list:
        return value.tolist()

    @property
    def dim(self) -> int:
        return self.metric.shape[0]

    def orthonormal_frame(self) -> np.ndarray:
        """Columns of g^{-1/2}, an orthonormal frame at the point."""
        w, v = np.linalg.eigh(self.metric)
        return v @ np.diag(w ** -0.5) @ v.T

    def to_curvature_data(self) -> CurvatureData:
        """Riemann tensor in an orthonormal frame, as normal-coordinate data."""
        e = self.orthonormal_frame()
        frame_riemann = np.einsum("ijkl,ia,jb,kc,ld->abcd", self.riemann, e, e, e, e, optimize=True)
        return from_riemann(frame_riemann, project=True)


def curvature_at(chart: ManifoldChart, u, fd_step: Optional[float] = None) -> CurvatureAtPoint:
    """
    Christoffel symbols, Riemann, Ricci, scalar and Weyl tensors at ``u``.

    Args:
        chart: chart or (nested) warped product
        u: chart coordinates
        fd_step: coarse finite-difference step; defaults to eps_mach^{1/6} times
            the chart scale. The stencil reaches 2 * fd_step from u.

    Raises:
        OutOfDomain: u closer than 2 * fd_step to the boundary
        SingularMetric: metric not positive definite at u
        SymmetryViolation: Riemann symmetries broken beyond 10 * FD_TOLERANCE
    """
    u = np.asarray(u, dtype=float)
    h = default_step(chart) if fd_step is None else fd_step
    chart.check_domain(u, margin=2.0 * h)
    g = check_metric(chart.metric(u), u)
    g_inv = np.linalg.inv(g)
    g_inv = 0.5 * (g_inv + g_inv.T)
    dg, ddg = metric_derivatives(chart, u, h)

    gamma_lower = 0.5 * (
        np.einsum("ijk->kij", dg) + np.einsum("jik->kij", dg) - dg
    )
    christoffel = np.einsum("kl,lij->kij", g_inv, gamma_lower)

    riemann = 0.5 * (
        np.einsum("jkil->ijkl", ddg)
        + np.einsum("iljk->ijkl", ddg)
        - np.einsum("ikjl->ijkl", ddg)
        - np.einsum("jlik->ijkl", ddg)
    )
    riemann += np.einsum("pjk,pil->ijkl", christoffel, gamma_lower)
    riemann -= np.einsum("pjl,pik->ijkl", christoffel, gamma_lower)

    scale = max(1.0, float(np.max(np.abs(riemann))))
    defect = max(symmetry_defects(riemann).values())
    if defect > 10.0 * FD_TOLERANCE * scale:
        raise SymmetryViolation(
            "finite-difference Riemann tensor fails the algebraic symmetries",
            details={"defect": defect, "point": u.tolist(), "fd_step": h},
        )

    ricci = np.einsum("ik,ijkl->jl", g_inv, riemann)
    ricci = 0.5 * (ricci + ricci.T)
    scalar = float(np.einsum("jl,jl->", g_inv, ricci))
    weyl = weyl_tensor(riemann, ricci, scalar, g)
    norm_sq = float(np.einsum("ijkl,ijkl->", weyl, raise_all(weyl, g_inv)))
    trace = np.einsum("ik,ijkl->jl", g_inv, weyl)

    return CurvatureAtPoint(
        point=u,
        metric=g,
        inverse_metric=g_inv,
        christoffel=christoffel,
        riemann=riemann,
        ricci=ricci,
        scalar=scalar,
        weyl=weyl,
        weyl_norm_sq=max(0.0, norm_sq),
        fd_step=h,
        symmetry_defect=defect,
        weyl_trace_defect=float(np.max(np.abs(trace))),
    )


def weyl_norm(c: CurvatureAtPoint) -> float:
    """|W|^2 = W_ijkl W^ijkl."""
    if c.dim < 4:
        raise DimensionTooLow("the Weyl tensor vanishes identically for n <= 3", details={"dim": c.dim})
    return c.weyl_norm_sq


Classification = Literal["flat", "non_flat", "indeterminate"]
Expectation = Literal["flat", "non_flat", "not_flat"]


class LCFReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    dim: int
    points: int
    tol: float
    is_flat_candidate: bool
    max_weyl: float
    min_weyl: float
    classification: Classification
    values: List[float]


def classify(max_weyl: float, min_weyl: float) -> Classification:
    """flat: all |W|^2 <= zero threshold; non_flat: all >= nonzero threshold."""
    if max_weyl <= WEYL_ZERO_THRESHOLD:
        return "flat"
    if min_weyl >= WEYL_NONZERO_THRESHOLD:
        return "non_flat"
    return "indeterminate"


def meets_expectation(report: LCFReport, expect: Optional[Expectation]) -> bool:
    """
    flat: every sampled |W|^2 within the report tolerance; non_flat: every
    sample at or above the nonzero threshold; not_flat: at least one sample
    there. No expectation passes unless the samples are indeterminate.
    """
    if expect == "flat":
        return report.is_flat_candidate
    if expect == "non_flat":
        return report.min_weyl >= WEYL_NONZERO_THRESHOLD
    if expect == "not_flat":
        return report.max_weyl >= WEYL_NONZERO_THRESHOLD
    return report.classification != "indeterminate"


def lcf_check(
    chart: ManifoldChart,
    samples: Sequence[Sequence[float]],
    tol: Optional[float] = None,
    fd_step: Optional[float] = None,
) -> LCFReport:
    """
    Sampled local-conformal-flatness test.

    is_flat_candidate is true iff the largest sampled |W|^2 is <= tol.
    """
    if chart.dim < 4:
        raise DimensionTooLow("conformal flatness is tested through the Weyl tensor only for n >= 4", details={"dim": chart.dim})
    if len(samples) == 0:
        raise ConfigInvalid("lcf_check needs at least one sample point")
    tol = WEYL_ZERO_THRESHOLD if tol is None else tol
    values = [weyl_norm(curvature_at(chart, u, fd_step)) for u in samples]
    max_weyl = max(values)
    min_weyl = min(values)
    report = LCFReport(
        dim=chart.dim,
        points=len(values),
        tol=tol,
        is_flat_candidate=max_weyl <= tol,
        max_weyl=max_weyl,
        min_weyl=min_weyl,
        classification=classify(max_weyl, min_weyl),
        values=values,
    )
    logger.info(
        "LCF check finished",
        extra={"dim": chart.dim, "points": len(values), "max_weyl": max_weyl, "classification": report.classification},
    )
    return report
