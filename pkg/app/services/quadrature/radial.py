"""
Radial and annular integrals over R^N.

All routines reduce an N-dimensional integral of a radial function (or of a
monomial times a radial function) to one-dimensional adaptive quadrature in
the radius, using sigma_{N-1} = 2 pi^{N/2} / Gamma(N/2) for the area of the
unit sphere.
"""
import math
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from app.core.config import QUAD_REL_TOL
from app.core.exceptions import (
    ComputationFailed,
    ConfigInvalid,
    NonIntegrable,
    ToleranceNotReached,
    UnsupportedDegree,
)
from app.core.logging_config import get_logger
from app.services.quadrature.base import (
    LogQuadratureResult,
    QuadratureResult,
    RadialIntegrand,
    RadialInterval,
    ScaledValue,
)
from app.services.quadrature.gauss_kronrod import adaptive_integrate, gauss_kronrod_15

logger = get_logger(__name__)

# t-grid of the initial panels on [0, 1) for r = t / (1 - t); covers r in [1e-3, 1e3].
_UNBOUNDED_T_BREAKS = (1e-3, 1e-2, 0.1, 0.5, 0.9, 0.99, 0.999)
_REFERENCE_SAMPLES = 129


def log_sphere_area(dim: int) -> float:
    """log sigma_{N-1}, the log of the area of the unit sphere in R^N."""
    return math.log(2.0) + 0.5 * dim * math.log(math.pi) - float(gammaln(0.5 * dim))


def sphere_area(dim: int) -> float:
    """sigma_{N-1} = 2 pi^{N/2} / Gamma(N/2)."""
    return math.exp(log_sphere_area(dim))


def _check_tolerance(rel_tol: float) -> None:
    if not 0.0 < rel_tol < 1.0:
        raise ConfigInvalid("rel_tol must lie in (0, 1)", details={"rel_tol": rel_tol})


def _finish(result: QuadratureResult, strict: bool, context: Dict) -> QuadratureResult:
    if result.converged:
        return result
    if strict:
        raise ToleranceNotReached(
            "Adaptive refinement budget exhausted",
            best_estimate=result,
            details=context,
        )
    logger.warning(
        "Quadrature tolerance not reached, returning best estimate",
        extra={**context, "value": result.value, "abs_error_estimate": result.abs_error_estimate},
    )
    return result


def integrate_radial(
    f: RadialIntegrand,
    dom: RadialInterval,
    dim: int,
    rel_tol: Optional[float] = None,
    abs_tol: float = 0.0,
    strict: bool = False,
    scale: float = 1.0,
    breakpoints: Sequence[float] = (),
) -> QuadratureResult:
    """
    Integrate f(|x|) over the shell ``dom`` in R^dim.

    Computes sigma_{N-1} * int r^{N-1} f(r) dr. Unbounded shells are mapped to
    [0, 1) by r = inner + scale * t / (1 - t).

    Args:
        f: radial integrand, vectorised over numpy arrays
        dom: shell [inner, outer)
        dim: ambient dimension N
        rel_tol: relative tolerance (defaults to QUAD_REL_TOL)
        abs_tol: absolute tolerance floor, for integrals expected near zero
        strict: raise ToleranceNotReached instead of returning a flagged estimate
        scale: length scale of the unbounded map
        breakpoints: radii where the integrand changes character

    Returns:
        QuadratureResult of the N-dimensional integral
    """
    rel_tol = QUAD_REL_TOL if rel_tol is None else rel_tol
    _check_tolerance(rel_tol)
    if dim < 1:
        raise ConfigInvalid("dimension must be positive", details={"dim": dim})
    area = sphere_area(dim)

    if dom.unbounded:
        hint = f.decay_exponent_hint
        if hint is None or -hint + (dim - 1) >= -1:
            raise NonIntegrable(
                "Decay too slow for an unbounded shell",
                details={"decay_exponent_hint": hint, "dim": dim},
            )
        inner = dom.inner

        def mapped(t: np.ndarray) -> np.ndarray:
            one_minus = 1.0 - t
            r = inner + scale * t / one_minus
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                fr = np.asarray(f(r), dtype=float)
                return np.where(fr == 0.0, 0.0, fr * r ** (dim - 1) * scale / one_minus ** 2)

        t_breaks = list(_UNBOUNDED_T_BREAKS)
        for radius in breakpoints:
            x = (radius - inner) / scale
            if x > 0.0:
                t_breaks.append(x / (1.0 + x))
        raw = adaptive_integrate(mapped, 0.0, 1.0, rel_tol, abs_tol / area, t_breaks)
    else:
        def weighted(r: np.ndarray) -> np.ndarray:
            with np.errstate(under="ignore"):
                return np.asarray(f(r), dtype=float) * r ** (dim - 1)

        raw = adaptive_integrate(weighted, dom.inner, dom.outer, rel_tol, abs_tol / area, breakpoints)

    result = QuadratureResult(
        value=area * raw.value,
        abs_error_estimate=area * raw.abs_error_estimate,
        evaluations=raw.evaluations,
        converged=raw.converged,
    )
    return _finish(result, strict, {"dim": dim, "inner": dom.inner, "outer": dom.outer})


def _angular_monomial_log_integral(exponents: Sequence[float], dim: int) -> float:
    """log of int_{S^{N-1}} prod |w_i|^{b_i} dw = 2 prod Gamma((b_i+1)/2) / Gamma((sum b + N)/2)."""
    padded = list(exponents) + [0.0] * (dim - len(exponents))
    total = math.fsum(padded)
    return (
        math.log(2.0)
        + math.fsum(float(gammaln(0.5 * (b + 1.0))) for b in padded)
        - float(gammaln(0.5 * (total + dim)))
    )


def lq_norm_shell(
    f: RadialIntegrand,
    dom: RadialInterval,
    q: float,
    dim: int,
    rel_tol: Optional[float] = None,
    monomial: Optional[Sequence[int]] = None,
) -> float:
    """
    (int_shell |f|^q dx)^{1/q} for f = x^alpha g(|x|) or a pure radial g.

    The angular part of |x^alpha|^q integrates in closed form, leaving one
    radial quadrature.
    """
    if q < 1.0:
        raise ConfigInvalid("q must be at least 1", details={"q": q})
    alpha = list(monomial or [])
    if len(alpha) > dim:
        raise ConfigInvalid("monomial has more exponents than dimensions", details={"monomial": alpha})
    degree = sum(alpha)

    def powered(r: np.ndarray) -> np.ndarray:
        with np.errstate(under="ignore"):
            return np.abs(np.asarray(f(r), dtype=float)) ** q * r ** (q * degree)

    hint = None if f.decay_exponent_hint is None else q * (f.decay_exponent_hint - degree)
    radial = integrate_radial(RadialIntegrand(eval=powered, decay_exponent_hint=hint), dom, dim, rel_tol)
    if radial.value <= 0.0:
        return 0.0
    angular = math.exp(_angular_monomial_log_integral([q * a for a in alpha], dim) - log_sphere_area(dim))
    return (angular * radial.value) ** (1.0 / q)


def integrate_log_radial(
    log_f: Callable[[np.ndarray], np.ndarray],
    ln_inner: float,
    ln_outer: float,
    dim: int,
    rel_tol: Optional[float] = None,
    breakpoints: Sequence[float] = (),
) -> LogQuadratureResult:
    """
    Integrate a positive radial function given through its logarithm.

    ``log_f(s)`` returns ln f(e^s) for log-radii s; ``ln_inner`` may be -inf
    (a ball) and ``ln_outer`` may be +inf. The integral
    sigma_{N-1} int exp(log_f(s) + N s) ds is normalised by the largest sampled
    exponent before quadrature and returned as a ScaledValue, so radii and
    values far outside double range are fine.
    """
    rel_tol = QUAD_REL_TOL if rel_tol is None else rel_tol
    _check_tolerance(rel_tol)
    if not ln_inner < ln_outer:
        raise ConfigInvalid("empty log-radial interval", details={"ln_inner": ln_inner, "ln_outer": ln_outer})

    cuts = sorted({ln_inner, ln_outer} | {b for b in breakpoints if ln_inner < b < ln_outer})
    if math.isinf(cuts[0]) and math.isinf(cuts[-1]) and len(cuts) == 2:
        cuts = [cuts[0], 0.0, cuts[1]]

    segments = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        segments.append(_log_segment(log_f, lo, hi, dim))

    grid = (np.arange(_REFERENCE_SAMPLES) + 0.5) / _REFERENCE_SAMPLES
    samples = np.concatenate([segment(grid) for segment in segments])
    finite = samples[np.isfinite(samples)]
    if finite.size == 0:
        return LogQuadratureResult(value=ScaledValue(), rel_error_estimate=0.0, evaluations=grid.size * len(segments))
    reference = float(np.max(finite))

    def normalised(segment):
        def integrand(u: np.ndarray) -> np.ndarray:
            with np.errstate(under="ignore"):
                return np.exp(segment(u) - reference)
        return integrand

    integrands = [normalised(segment) for segment in segments]
    coarse = math.fsum(abs(gauss_kronrod_15(g, 0.0, 1.0)[0]) for g in integrands)
    abs_tol = 0.25 * rel_tol * coarse / len(integrands)

    results = [adaptive_integrate(g, 0.0, 1.0, rel_tol, abs_tol) for g in integrands]
    total = math.fsum(r.value for r in results)
    error = math.fsum(r.abs_error_estimate for r in results)
    evaluations = sum(r.evaluations for r in results) + 15 * len(integrands) + grid.size * len(segments)
    if total <= 0.0:
        return LogQuadratureResult(value=ScaledValue(), rel_error_estimate=0.0, evaluations=evaluations)

    converged = all(r.converged for r in results) and error <= rel_tol * total
    if not converged:
        logger.warning(
            "Log-radial quadrature tolerance not reached",
            extra={"ln_inner": ln_inner, "ln_outer": ln_outer, "rel_error": error / total},
        )
    return LogQuadratureResult(
        value=ScaledValue.from_log(reference + math.log(total) + log_sphere_area(dim)),
        rel_error_estimate=error / total,
        evaluations=evaluations,
        converged=converged,
    )


def _log_segment(log_f, lo: float, hi: float, dim: int):
    """Log-integrand on u in [0, 1) for one segment of the log-radius axis."""
    if math.isinf(lo) and lo < 0:
        def position(u):
            stretch = u / (1.0 - u)
            return hi - stretch, -2.0 * np.log1p(-u)
    elif math.isinf(hi):
        def position(u):
            stretch = u / (1.0 - u)
            return lo + stretch, -2.0 * np.log1p(-u)
    else:
        width = hi - lo
        log_width = math.log(width)

        def position(u):
            return lo + width * u, np.full_like(u, log_width)

    def segment(u: np.ndarray) -> np.ndarray:
        s, log_jacobian = position(np.asarray(u, dtype=float))
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            values = np.asarray(log_f(s), dtype=float) + dim * s + log_jacobian
        if np.any(np.isnan(values)):
            raise ComputationFailed("Log-integrand returned NaN", details={"dim": dim})
        return values

    return segment


def lq_norm_log_shell(
    log_f: Callable[[np.ndarray], np.ndarray],
    ln_inner: float,
    ln_outer: float,
    q: float,
    dim: int,
    rel_tol: Optional[float] = None,
    breakpoints: Sequence[float] = (),
) -> ScaledValue:
    """Log-space counterpart of lq_norm_shell for positive radial functions."""
    if q < 1.0:
        raise ConfigInvalid("q must be at least 1", details={"q": q})
    result = integrate_log_radial(lambda s: q * log_f(s), ln_inner, ln_outer, dim, rel_tol, breakpoints)
    return result.value ** (1.0 / q)


def radial_moment(g: RadialIntegrand, degree: int, dim: int, rel_tol: Optional[float] = None) -> float:
    """int |x|^degree g(|x|) dx over R^N."""
    hint = None if g.decay_exponent_hint is None else g.decay_exponent_hint - degree

    def weighted(r: np.ndarray) -> np.ndarray:
        return r ** degree * np.asarray(g(r), dtype=float)

    return integrate_radial(RadialIntegrand(eval=weighted, decay_exponent_hint=hint), RadialInterval(), dim, rel_tol).value


def _check_moment_degree(degree: int) -> None:
    if degree > 4:
        raise UnsupportedDegree("moments above degree four are not reduced", details={"degree": degree})


def moment_integral(
    g: RadialIntegrand,
    monomial: Sequence[int],
    dim: int,
    rel_tol: Optional[float] = None,
) -> float:
    """
    int x^alpha g(|x|) dx over R^N by symmetry reduction.

    Any odd exponent gives exactly 0 without quadrature. Even monomials reduce
    to int r^{|alpha|} g dx times the delta-tensor weight of the monomial.
    """
    alpha = list(monomial)
    if len(alpha) > dim or any(a < 0 for a in alpha):
        raise ConfigInvalid("invalid multi-index", details={"monomial": alpha, "dim": dim})
    if any(a % 2 for a in alpha):
        return 0.0
    degree = sum(alpha)
    _check_moment_degree(degree)
    if degree == 0:
        return radial_moment(g, 0, dim, rel_tol)
    if degree == 2:
        return radial_moment(g, 2, dim, rel_tol) / dim
    # degree 4: x_a^4 carries weight 3, x_a^2 x_b^2 weight 1
    weight = 3.0 if max(alpha) == 4 else 1.0
    return weight * radial_moment(g, 4, dim, rel_tol) / (dim * (dim + 2))


def moment_tensor(g: RadialIntegrand, degree: int, dim: int, rel_tol: Optional[float] = None) -> np.ndarray:
    """
    Full tensor M[a, b, ...] = int x_a x_b ... g(|x|) dx for degree <= 4.

    Odd degrees return the zero tensor without quadrature.
    """
    shape: Tuple[int, ...] = (dim,) * degree
    if degree % 2:
        return np.zeros(shape)
    _check_moment_degree(degree)
    identity = np.eye(dim)
    if degree == 0:
        return np.array(radial_moment(g, 0, dim, rel_tol))
    if degree == 2:
        return identity * radial_moment(g, 2, dim, rel_tol) / dim
    deltas = (
        np.einsum("ab,ij->abij", identity, identity)
        + np.einsum("ai,bj->abij", identity, identity)
        + np.einsum("aj,bi->abij", identity, identity)
    )
    return deltas * radial_moment(g, 4, dim, rel_tol) / (dim * (dim + 2))
