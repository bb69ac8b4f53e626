"""
Solvability constant of the correction equation at the blow-up point.

The curvature part of the right-hand side is

    RHS_0 = -(1/3) R_{iabj} x_a x_b d_ij U + d_l Gamma^k_{ii} x_l d_k U + beta_N R_g U

and nu is fixed by L^2 orthogonality of RHS_0 + nu psi^0 to psi^0. Using
d_ij U = delta_ij U'/r + x_i x_j (U'' - U'/r)/r^2 every pairing reduces to
moments of radial profiles, so no N-dimensional cubature is needed.
"""
from collections import Counter
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.config import QUAD_REL_TOL
from app.core.exceptions import DimensionTooLow
from app.core.logging_config import get_logger
from app.services.bubbles.bubble import bubble_profile, kernel_profile
from app.services.bubbles.curvature_data import CurvatureData
from app.services.quadrature.base import RadialIntegrand, RadialInterval
from app.services.quadrature.radial import integrate_radial, moment_integral, moment_tensor

logger = get_logger(__name__)


def conformal_coefficient(dim: int) -> float:
    """beta_N = (N-2) / (4(N-1))."""
    return (dim - 2) / (4.0 * (dim - 1))


def _check_dim(c: CurvatureData) -> None:
    if c.dim < 5:
        raise DimensionTooLow("psi^0 is square integrable only for N >= 5", details={"dim": c.dim})


class SolvabilityReport(BaseModel):
    """nu together with the quadrature recheck of the Fredholm condition."""
    model_config = ConfigDict(frozen=True)

    dim: int
    nu: float
    projection: float
    psi0_norm_sq: float
    fredholm_residual: float
    fredholm_bound: float
    passed: bool


def _projection_onto_psi0(c: CurvatureData, rel_tol: float) -> Tuple[float, float]:
    """(<RHS_0, psi^0>, <psi^0, psi^0>) via moment tensors."""
    n = c.dim
    u = bubble_profile(n)
    psi0 = kernel_profile(n, 0)
    first = (u.radial_derivative_over_r() * psi0).as_integrand()
    hessian_part = (u.hessian_radial_part() * psi0).as_integrand()

    m2 = moment_tensor(first, 2, n, rel_tol)
    m4 = moment_tensor(hessian_part, 4, n, rel_tol)
    identity = np.eye(n)

    riemann_term = -(
        np.einsum("iabj,ij,ab->", c.riemann, identity, m2)
        + np.einsum("iabj,abij->", c.riemann, m4)
    ) / 3.0
    christoffel_term = np.einsum("lki,lk->", c.christoffel_derivs, m2)
    scalar_term = 0.0
    if c.scalar_curv != 0.0:
        overlap = moment_integral((u * psi0).as_integrand(), [], n, rel_tol)
        scalar_term = conformal_coefficient(n) * c.scalar_curv * overlap

    norm_sq = integrate_radial((psi0 * psi0).as_integrand(), RadialInterval(), n, rel_tol).value
    return float(riemann_term + christoffel_term + scalar_term), norm_sq


def solvability_nu(c: CurvatureData, rel_tol: Optional[float] = None) -> float:
    """nu = -<RHS_0, psi^0> / <psi^0, psi^0>."""
    _check_dim(c)
    rel_tol = QUAD_REL_TOL if rel_tol is None else rel_tol
    projection, norm_sq = _projection_onto_psi0(c, rel_tol)
    return -projection / norm_sq


def _averaged_rhs(c: CurvatureData) -> RadialIntegrand:
    """Spherical average of RHS_0 as a function of r."""
    n = c.dim
    identity = np.eye(n)
    deltas = (
        np.einsum("ab,ij->abij", identity, identity)
        + np.einsum("ai,bj->abij", identity, identity)
        + np.einsum("aj,bi->abij", identity, identity)
    )
    c2 = float(np.einsum("iabj,ij,ab->", c.riemann, identity, identity)) / n
    c4 = float(np.einsum("iabj,abij->", c.riemann, deltas)) / (n * (n + 2))
    cd = float(np.einsum("lki,lk->", c.christoffel_derivs, identity)) / n
    beta_r = conformal_coefficient(n) * c.scalar_curv

    u = bubble_profile(n)
    r_du = u.radial_derivative_over_r().times_r_squared()
    r4_hessian = u.hessian_radial_part().times_r_squared().times_r_squared()

    def average(r: np.ndarray) -> np.ndarray:
        return (cd - c2 / 3.0) * r_du(r) - (c4 / 3.0) * r4_hessian(r) + beta_r * u(r)

    return RadialIntegrand(eval=average, decay_exponent_hint=float(n - 2))


def solvability_report(c: CurvatureData, rel_tol: Optional[float] = None) -> SolvabilityReport:
    """Compute nu and re-verify <RHS_0 + nu psi^0, psi^0> = 0 by direct quadrature."""
    _check_dim(c)
    rel_tol = QUAD_REL_TOL if rel_tol is None else rel_tol
    projection, norm_sq = _projection_onto_psi0(c, rel_tol)
    nu = -projection / norm_sq

    psi0 = kernel_profile(c.dim, 0)
    rhs = _averaged_rhs(c)

    def paired(r: np.ndarray) -> np.ndarray:
        psi = psi0(r)
        return (rhs(r) + nu * psi) * psi

    residual = integrate_radial(
        RadialIntegrand(eval=paired, decay_exponent_hint=2.0 * (c.dim - 2)),
        RadialInterval(),
        c.dim,
        rel_tol,
        abs_tol=rel_tol * norm_sq,
    ).value
    bound = 10.0 * rel_tol * norm_sq
    report = SolvabilityReport(
        dim=c.dim,
        nu=nu,
        projection=projection,
        psi0_norm_sq=norm_sq,
        fredholm_residual=residual,
        fredholm_bound=bound,
        passed=abs(residual) <= bound,
    )
    logger.info("Solvability constant computed", extra={"dim": c.dim, "nu": nu, "fredholm_residual": residual})
    return report


def rhs_kernel_orthogonality(c: CurvatureData, rel_tol: Optional[float] = None) -> np.ndarray:
    """
    <RHS_0, psi^m> for m = 1..N, assembled monomial by monomial.

    Every pairing has odd degree in some coordinate, so each moment is zero by
    parity and no quadrature runs; the loop exercises the assembly anyway.
    """
    _check_dim(c)
    rel_tol = QUAD_REL_TOL if rel_tol is None else rel_tol
    n = c.dim
    u = bubble_profile(n)
    q = kernel_profile(n, 1)
    integrands = {
        "first": (u.radial_derivative_over_r() * q).as_integrand(),
        "hessian": (u.hessian_radial_part() * q).as_integrand(),
        "value": (u * q).as_integrand(),
    }
    cache: Dict[Tuple[str, Tuple[int, ...]], float] = {}

    def moment(kind: str, *indices: int) -> float:
        counts = Counter(indices)
        key = (kind, tuple(counts.get(a, 0) for a in range(n)))
        if key not in cache:
            cache[key] = moment_integral(integrands[kind], list(key[1]), n, rel_tol)
        return cache[key]

    beta = conformal_coefficient(n)
    projections = np.zeros(n)
    riemann_entries = np.argwhere(c.riemann != 0.0)
    christoffel_entries = np.argwhere(c.christoffel_derivs != 0.0)
    for m in range(n):
        total = 0.0
        for i, a, b, j in riemann_entries:
            value = c.riemann[i, a, b, j]
            if i == j:
                total -= value * moment("first", a, b, m) / 3.0
            total -= value * moment("hessian", a, b, i, j, m) / 3.0
        for l, k, i in christoffel_entries:
            total += c.christoffel_derivs[l, k, i] * moment("first", l, k, m)
        if c.scalar_curv != 0.0:
            total += beta * c.scalar_curv * moment("value", m)
        projections[m] = total
    return projections
