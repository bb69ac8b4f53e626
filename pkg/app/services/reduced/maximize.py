"""
Sequential maximization of the reduced energy and its scaled Hessian.

d_1* maximizes G_1; for l >= 2, with d_{l-1}* fixed, d_l* maximizes G_l:

    d_1* = (B_N / (2 A_N w))^{1/2}
    d_l* = ((N-2) C_N / (4 B_N))^{2/(6-N)} (d_{l-1}*)^{(N-2)/(N-6)}

Heights shrink super-exponentially with l, so they are carried as logs. The
closed forms are cross-checked by golden-section search on x = d / d_closed of
the gain G(x d) - G(d), written with expm1 so that it stays accurate near x = 1.
"""
import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.exceptions import ConfigInvalid, DegenerateWeyl, StepTooSmall
from app.core.logging_config import get_logger
from app.services.reduced.model import ReducedModel, g1, g_ell

logger = get_logger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2

BRACKET = (1e-6, 1e3)
BRACKET_WIDTH = 1e-12
AGREEMENT_TOLERANCE = 1e-8
MIN_FD_STEP = 1e-6


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = BRACKET_WIDTH) -> float:
    """
    Maximizer of a unimodal f on [a, b], to a final bracket of width ``tol``.

    The number of steps is fixed up front, so the search is deterministic.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        return 0.5 * (a + b)
    steps = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(steps - 1):
        if yc > yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)
    return 0.5 * (a + d) if yc > yd else 0.5 * (c + b)


class LevelMaximum(BaseModel):
    model_config = ConfigDict(frozen=True)

    level: int
    closed_form: float
    log_closed_form: float
    oracle: float
    relative_difference: float
    scaled_second_derivative: float
    concave: bool
    maximum: float


class MaximizationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    dim: int
    k: int
    weyl_sq: float
    d_star: List[float]
    log_d_star: List[float]
    levels: List[LevelMaximum]
    max_relative_difference: float
    agrees: bool
    all_concave: bool


class ProbeReport(BaseModel):
    """Sequential-optimality probes: every perturbed height must lower G_l."""
    model_config = ConfigDict(frozen=True)

    probes: int
    failures: int
    worst_gain: float
    passed: bool


class HessianReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    negdef: bool
    eigenvalues: List[float]
    max_eigenvalue: float
    fd_step: float
    eps: float


def _check_weyl(m: ReducedModel) -> None:
    if not m.weyl_sq > 0.0:
        raise DegenerateWeyl(
            "G_1 has no interior maximum when |Weyl|^2 <= 0",
            details={"weyl_sq": m.weyl_sq},
        )


def log_closed_form_heights(m: ReducedModel) -> List[float]:
    """ln d_l* for l = 1..k."""
    _check_weyl(m)
    n = m.dim
    logs = [0.5 * (math.log(m.b_n) - math.log(2.0 * m.a_n * m.weyl_sq))]
    factor = (2.0 / (6 - n)) * math.log((n - 2) * m.c_n / (4.0 * m.b_n))
    growth = (n - 2) / (n - 6)
    for _ in range(1, m.k):
        logs.append(factor + growth * logs[-1])
    return logs


def _scaled_coefficients(m: ReducedModel, log_d: List[float]) -> List[Tuple[float, float]]:
    """
    (c_l, a_l) with G_l(x d_l) / (B d_l^2) = -c_l x^{a_l} + x^2 at fixed d_{l-1}.

    G_1: a = 4, c = A w d_1^2 / B; G_l: a = (N-2)/2, c = C (d_l/d_{l-1})^a / (B d_l^2).
    """
    a = m.interaction_exponent
    coefficients = [(math.exp(math.log(m.a_n * m.weyl_sq / m.b_n) + 2.0 * log_d[0]), 4.0)]
    for level in range(2, m.k + 1):
        log_c = (
            math.log(m.c_n / m.b_n)
            + a * (log_d[level - 1] - log_d[level - 2])
            - 2.0 * log_d[level - 1]
        )
        coefficients.append((math.exp(log_c), a))
    return coefficients


def _gain(c: float, a: float) -> Callable[[float], float]:
    """x -> [G(x d) - G(d)] / (B d^2) = -c expm1(a ln x) + expm1(2 ln x)."""
    def gain(x: float) -> float:
        lx = math.log(x)
        return -c * math.expm1(a * lx) + math.expm1(2.0 * lx)
    return gain


def maximize_sequential(m: ReducedModel) -> Tuple[List[float], MaximizationReport]:
    """
    Closed-form sequential maximizers, each checked by golden section.

    Returns:
        (d_star, report); d_star entries may underflow to 0 for deep levels,
        log_d_star in the report does not.

    Raises:
        DegenerateWeyl: weyl_sq <= 0
    """
    log_d = log_closed_form_heights(m)
    levels = []
    for level, (c, a) in enumerate(_scaled_coefficients(m, log_d), start=1):
        x_star = golden_section(_gain(c, a), *BRACKET)
        closed = math.exp(log_d[level - 1])
        if level == 1:
            maximum = g1(m, closed)
        else:
            maximum = g_ell(m, level, math.exp(log_d[level - 2]), closed)
        second = -c * a * (a - 1.0) + 2.0
        levels.append(LevelMaximum(
            level=level,
            closed_form=closed,
            log_closed_form=log_d[level - 1],
            oracle=x_star * closed,
            relative_difference=abs(x_star - 1.0),
            scaled_second_derivative=second,
            concave=second < 0.0,
            maximum=maximum,
        ))

    worst = max(entry.relative_difference for entry in levels)
    report = MaximizationReport(
        dim=m.dim,
        k=m.k,
        weyl_sq=m.weyl_sq,
        d_star=[entry.closed_form for entry in levels],
        log_d_star=log_d,
        levels=levels,
        max_relative_difference=worst,
        agrees=worst <= AGREEMENT_TOLERANCE,
        all_concave=all(entry.concave for entry in levels),
    )
    logger.info(
        "Sequential maximization finished",
        extra={"dim": m.dim, "k": m.k, "max_relative_difference": worst},
    )
    return report.d_star, report


def sequential_probes(m: ReducedModel, count: int = 1000, seed: int = 0, spread: float = 3.0) -> ProbeReport:
    """
    G_l(d_{l-1}*, d) < G_l(d_{l-1}*, d_l*) for random d = x d_l*, ln x uniform in [-spread, spread].
    """
    log_d = log_closed_form_heights(m)
    gains = [_gain(c, a) for c, a in _scaled_coefficients(m, log_d)]
    rng = np.random.default_rng(seed)
    failures = 0
    worst = -math.inf
    for _ in range(count):
        level = int(rng.integers(0, m.k))
        log_x = float(rng.uniform(-spread, spread))
        if abs(log_x) < 1e-6:
            continue
        value = gains[level](math.exp(log_x))
        worst = max(worst, value)
        if not value < 0.0:
            failures += 1
    return ProbeReport(probes=count, failures=failures, worst_gain=worst, passed=failures == 0)


def hessian_check(
    m: ReducedModel,
    d: List[float],
    eps: float,
    fd_step: float = 1e-4,
) -> HessianReport:
    """
    Central-difference Hessian of sum_l eps^{theta_l} G_l in scaled variables.

    With z_l = d_l' / d_l, G~_l = G_l / (B d_l^2) and
    lambda_l = ln(eps^{theta_l} B d_l^2), the matrix
    H[i, j] = sum_l exp(lambda_l - (lambda_i + lambda_j)/2) d_i d_j G~_l
    is congruent to the Hessian in z, so it has the same inertia, while every
    level contributes at order one.
    """
    if fd_step < MIN_FD_STEP:
        raise StepTooSmall("finite-difference step below the rounding floor", details={"fd_step": fd_step})
    if len(d) != m.k or any(h <= 0.0 for h in d):
        raise ConfigInvalid("need k positive heights", details={"d": list(d), "k": m.k})
    if eps <= 0.0:
        raise ConfigInvalid("eps must be positive", details={"eps": eps})

    log_d = [math.log(h) for h in d]
    coefficients = _scaled_coefficients(m, log_d)
    log_eps = math.log(eps)
    lam = np.array([
        float(m.schedule.thetas[level]) * log_eps + math.log(m.b_n) + 2.0 * log_d[level]
        for level in range(m.k)
    ])

    def normalized(level: int, z: np.ndarray) -> float:
        c, a = coefficients[level]
        if level == 0:
            return -c * z[0] ** a + z[0] ** 2
        return -c * (z[level] / z[level - 1]) ** a + z[level] ** 2

    h = fd_step
    hessian = np.zeros((m.k, m.k))
    for level in range(m.k):
        variables = [level] if level == 0 else [level - 1, level]
        for i in variables:
            for j in variables:
                if j < i:
                    continue
                second = _second_difference(lambda z, lv=level: normalized(lv, z), m.k, i, j, h)
                weight = math.exp(lam[level] - 0.5 * (lam[i] + lam[j]))
                hessian[i, j] += weight * second
                if i != j:
                    hessian[j, i] += weight * second

    eigenvalues = np.linalg.eigvalsh(hessian)
    return HessianReport(
        negdef=bool(np.all(eigenvalues < 0.0)),
        eigenvalues=[float(v) for v in eigenvalues],
        max_eigenvalue=float(eigenvalues[-1]),
        fd_step=fd_step,
        eps=eps,
    )


def _second_difference(f: Callable[[np.ndarray], float], size: int, i: int, j: int, h: float) -> float:
    """Central second difference of f at z = (1, ..., 1)."""
    base = np.ones(size)
    if i == j:
        plus, minus = base.copy(), base.copy()
        plus[i] += h
        minus[i] -= h
        return (f(plus) - 2.0 * f(base) + f(minus)) / h ** 2

    def shifted(si: float, sj: float) -> float:
        z = base.copy()
        z[i] += si * h
        z[j] += sj * h
        return f(z)

    return (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * h ** 2)
