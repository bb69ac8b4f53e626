"""
Concentration schedule of the tower in exact rational arithmetic.

    gamma_j     = ((N-2)/(N-6))^{j-1} - 1/2
    theta_l     = 2 ((N-2)/(N-6))^{l-1} = 1 + 2 gamma_l

so mu_j = d_j eps^{gamma_j} balances eps mu_j^2 against (mu_l/mu_{l-1})^{(N-2)/2}.
"""
from fractions import Fraction
from typing import List

from pydantic import BaseModel, ConfigDict, field_serializer

from app.core.exceptions import ConfigInvalid, DimensionTooLow


def _growth(dim: int) -> Fraction:
    return Fraction(dim - 2, dim - 6)


def gamma(dim: int, j: int) -> Fraction:
    return _growth(dim) ** (j - 1) - Fraction(1, 2)


def theta(dim: int, level: int) -> Fraction:
    return 2 * _growth(dim) ** (level - 1)


def error_rate_exponent(dim: int, level: int) -> Fraction:
    """
    Exponent r with ||E_l|| = O(eps^r) for the level-l error term.

    Level 1 is 5/4 at N = 7 and 3/2 from N = 8 on (N = 8 carries an extra
    |ln eps| factor). Higher levels decay like eps^{p theta_l / 2}.
    """
    if level == 1:
        return Fraction(5, 4) if dim == 7 else Fraction(3, 2)
    return Fraction(dim + 2, dim - 2) * theta(dim, level) / 2


class ExponentSchedule(BaseModel):
    """gamma_j, theta_l and the error-rate exponents for levels 1..k."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dim: int
    k: int
    gammas: List[Fraction]
    thetas: List[Fraction]
    error_rates: List[Fraction]

    @field_serializer("gammas", "thetas", "error_rates")
    def _as_strings(self, values: List[Fraction]) -> List[str]:
        return [str(v) for v in values]

    @property
    def gamma_floats(self) -> List[float]:
        return [float(g) for g in self.gammas]

    @property
    def theta_floats(self) -> List[float]:
        return [float(t) for t in self.thetas]

    def table(self) -> List[dict]:
        """Rows for the schedule report, exact and float."""
        return [
            {
                "level": index + 1,
                "gamma": str(g),
                "gamma_float": float(g),
                "theta": str(t),
                "theta_float": float(t),
                "error_rate": str(e),
            }
            for index, (g, t, e) in enumerate(zip(self.gammas, self.thetas, self.error_rates))
        ]


def exponent_schedule(dim: int, k: int) -> ExponentSchedule:
    """
    Build the schedule for a k-bubble tower in dimension N.

    Raises:
        DimensionTooLow: N < 7 (N = 6 makes the growth factor singular)
        ConfigInvalid: k < 1
    """
    if dim < 7:
        raise DimensionTooLow("the tower schedule needs N >= 7", details={"dim": dim})
    if k < 1:
        raise ConfigInvalid("tower height must be at least 1", details={"k": k})
    levels = range(1, k + 1)
    return ExponentSchedule(
        dim=dim,
        k=k,
        gammas=[gamma(dim, j) for j in levels],
        thetas=[theta(dim, level) for level in levels],
        error_rates=[error_rate_exponent(dim, level) for level in levels],
    )


def check_exponent_identities(dim: int, levels: int) -> bool:
    """theta_l = 1 + 2 gamma_l for all l, and theta_l = (gamma_l - gamma_{l-1})(N-2)/2 for l >= 2."""
    schedule = exponent_schedule(dim, levels)
    g, t = schedule.gammas, schedule.thetas
    if any(t[i] != 1 + 2 * g[i] for i in range(levels)):
        return False
    if 4 * g[0] != 1 + 2 * g[0]:
        return False
    return all(
        t[i] == (g[i] - g[i - 1]) * Fraction(dim - 2, 2)
        for i in range(1, levels)
    )
