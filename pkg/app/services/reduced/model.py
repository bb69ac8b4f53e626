"""
Finite-dimensional reduced energy of a k-bubble tower.

    J(d) = D_N + eps^2 G_1(d_1) + sum_{l>=2} eps^{theta_l} G_l(d_{l-1}, d_l)
    G_1(d_1)  = -A_N w d_1^4 + B_N d_1^2,       w = |Weyl_g(xi)|_g^2
    G_l       = -C_N (d_l / d_{l-1})^{(N-2)/2} + B_N d_l^2

The o(1) remainders of the expansion are not modelled.
"""
import math
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.core.exceptions import ComputationFailed, ConfigInvalid
from app.services.energy.constants import EnergyConstants, get_constants
from app.services.energy.schedule import ExponentSchedule, exponent_schedule
from app.services.quadrature.base import ScaledValue

CoefficientSource = Literal["closed_form", "quadrature"]


class ReducedModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    dim: int = Field(..., ge=7)
    k: int = Field(..., ge=1)
    a_n: float = Field(..., gt=0.0)
    b_n: float = Field(..., gt=0.0)
    c_n: float = Field(..., gt=0.0)
    d_n: float = Field(..., gt=0.0)
    weyl_sq: float = Field(..., ge=0.0)
    schedule: ExponentSchedule
    coefficient_source: CoefficientSource = "closed_form"

    @property
    def interaction_exponent(self) -> float:
        """(N-2)/2."""
        return 0.5 * (self.dim - 2)

    def rescaled(self, factor: float) -> "ReducedModel":
        """Same model with A_N, B_N and C_N all multiplied by ``factor``."""
        return self.model_copy(update={
            "a_n": factor * self.a_n,
            "b_n": factor * self.b_n,
            "c_n": factor * self.c_n,
        })


def build_reduced_model(
    dim: int,
    k: int,
    weyl_sq: float,
    consts: Optional[EnergyConstants] = None,
    coefficient_source: CoefficientSource = "closed_form",
) -> ReducedModel:
    """
    Assemble the model from the energy constants.

    ``closed_form`` uses the closed forms A_N, B_N, C_N; ``quadrature`` replaces B_N
    and C_N by b_hat and c_hat. A_N is closed form in both cases.
    """
    consts = consts or get_constants(dim)
    if coefficient_source == "closed_form":
        b, c = consts.b_n, consts.c_n
    elif coefficient_source == "quadrature":
        b, c = consts.b_hat, consts.c_hat
    else:
        raise ConfigInvalid("unknown coefficient source", details={"coefficient_source": coefficient_source})
    return ReducedModel(
        dim=dim,
        k=k,
        a_n=consts.a_n,
        b_n=b,
        c_n=c,
        d_n=k * consts.d_n_per_bubble,
        weyl_sq=weyl_sq,
        schedule=exponent_schedule(dim, k),
        coefficient_source=coefficient_source,
    )


def g1(m: ReducedModel, d1: float) -> float:
    return -m.a_n * m.weyl_sq * d1 ** 4 + m.b_n * d1 ** 2


def g_ell(m: ReducedModel, ell: int, d_prev: float, d: float) -> float:
    """G_l; only d_{l-1} and d_l enter."""
    if ell < 2:
        raise ConfigInvalid("G_l is defined for l >= 2", details={"ell": ell})
    return -m.c_n * (d / d_prev) ** m.interaction_exponent + m.b_n * d ** 2


def level_terms(m: ReducedModel, d: List[float], eps: float) -> List[ScaledValue]:
    """eps^{theta_l} G_l for l = 1..k as ScaledValues."""
    if len(d) != m.k or any(h <= 0.0 for h in d):
        raise ConfigInvalid("need k positive heights", details={"d": list(d), "k": m.k})
    if eps <= 0.0:
        raise ConfigInvalid("eps must be positive", details={"eps": eps})
    thetas = m.schedule.thetas
    if thetas[0] != 2:
        raise ComputationFailed("schedule must start at theta_1 = 2", details={"dim": m.dim, "theta_1": str(thetas[0])})
    terms = []
    for level in range(1, m.k + 1):
        weight = ScaledValue.from_log(float(thetas[level - 1]) * math.log(eps))
        value = g1(m, d[0]) if level == 1 else g_ell(m, level, d[level - 2], d[level - 1])
        terms.append(weight * value)
    return terms


def reduced_energy_model(m: ReducedModel, d: List[float], eps: float) -> float:
    """D_N + eps^2 G_1(d_1) + sum_{l>=2} eps^{theta_l} G_l(d_{l-1}, d_l)."""
    total = ScaledValue.from_float(m.d_n)
    for term in level_terms(m, d, eps):
        total = total + term
    return total.to_float()
