"""
Aubin-Talenti bubbles and the kernel of the linearized critical operator.

U(x) = alpha_N (1 + |x|^2)^{-(N-2)/2} with alpha_N = (N(N-2))^{(N-2)/4} solves
-Laplacian U = U^p, p = (N+2)/(N-2). The kernel of -Laplacian - p U^{p-1} is
spanned by psi^0 = x . grad U + (N-2)/2 U and psi^i = d_i U.
"""
import math
from fractions import Fraction
from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.config import V_ENVELOPE_CONSTANT
from app.core.exceptions import DimensionTooLow
from app.services.bubbles.profiles import RadialProfile


def critical_exponent(dim: int) -> Fraction:
    return Fraction(dim + 2, dim - 2)


def bubble_constant(dim: int) -> float:
    """alpha_N = (N(N-2))^{(N-2)/4}."""
    return float(dim * (dim - 2)) ** ((dim - 2) / 4.0)


def bubble_profile(dim: int) -> RadialProfile:
    """U as a profile in s."""
    return RadialProfile.power(Fraction(-(dim - 2), 2), 1, bubble_constant(dim))


def critical_power_profile(dim: int) -> RadialProfile:
    """U^p = alpha_N * N(N-2) s^{-(N+2)/2}, using alpha_N^{p-1} = N(N-2)."""
    return RadialProfile.power(Fraction(-(dim + 2), 2), dim * (dim - 2), bubble_constant(dim))


def potential_profile(dim: int) -> RadialProfile:
    """p U^{p-1} = p N(N-2) s^{-2}."""
    return RadialProfile.power(-2, critical_exponent(dim) * dim * (dim - 2))


def kernel_profile(dim: int, index: int) -> RadialProfile:
    """
    psi^0 itself for index 0; for i >= 1 the profile q with psi^i = x_i q(s).
    """
    half = Fraction(dim, 2)
    alpha = bubble_constant(dim)
    if index == 0:
        # (alpha (N-2)/2) (2 - s) s^{-N/2}
        return RadialProfile({-half: dim - 2, 1 - half: Fraction(-(dim - 2), 2)}, alpha)
    return RadialProfile.power(-half, -(dim - 2), alpha)


class Bubble(BaseModel):
    """U_{mu,y}(x) = mu^{-(N-2)/2} U((x - y)/mu)."""
    model_config = ConfigDict(frozen=True)

    dim: int = Field(..., ge=3)
    mu: float = Field(1.0, gt=0.0)
    center: Optional[List[float]] = None

    @field_validator("center")
    @classmethod
    def _check_center(cls, value, info):
        dim = info.data.get("dim")
        if value is not None and dim is not None and len(value) != dim:
            raise ValueError(f"center must have {dim} coordinates")
        return value

    def center_array(self) -> np.ndarray:
        return np.zeros(self.dim) if self.center is None else np.asarray(self.center, dtype=float)


class KernelElement(BaseModel):
    """psi^index for index in 0..N."""
    model_config = ConfigDict(frozen=True)

    dim: int = Field(..., ge=3)
    index: int = Field(..., ge=0)

    @field_validator("index")
    @classmethod
    def _check_index(cls, value, info):
        dim = info.data.get("dim")
        if dim is not None and value > dim:
            raise ValueError(f"kernel index must lie in 0..{dim}")
        return value


def bubble_eval(
    b: Bubble,
    x,
    order: Literal["value", "gradient", "hessian"] = "value",
) -> Union[float, np.ndarray]:
    """
    Closed-form value, gradient or Hessian of U_{mu,y} at x.

    The Hessian uses d_ij U = delta_ij U'/r + x_i x_j (U'' - U'/r)/r^2, where
    U'/r = -alpha (N-2) s^{-N/2} and (U'' - U'/r)/r^2 = alpha N (N-2) s^{-(N+2)/2}.
    """
    n = b.dim
    alpha = bubble_constant(n)
    z = (np.asarray(x, dtype=float) - b.center_array()) / b.mu
    s = 1.0 + float(np.dot(z, z))
    prefactor = b.mu ** (-(n - 2) / 2.0)

    if order == "value":
        return prefactor * alpha * s ** (-(n - 2) / 2.0)

    first_over_r = -alpha * (n - 2) * s ** (-n / 2.0)
    if order == "gradient":
        return prefactor / b.mu * first_over_r * z
    if order == "hessian":
        radial_part = alpha * n * (n - 2) * s ** (-(n + 2) / 2.0)
        hessian = first_over_r * np.eye(n) + radial_part * np.outer(z, z)
        return prefactor / b.mu ** 2 * hessian
    raise ValueError(f"unknown order {order!r}")


def critical_equation_residual(b: Bubble, x) -> float:
    """Laplacian U_{mu,y} + U_{mu,y}^p at x; zero up to rounding."""
    laplacian = float(np.trace(bubble_eval(b, x, "hessian")))
    value = float(bubble_eval(b, x, "value"))
    return laplacian + value ** float(critical_exponent(b.dim))


def kernel_eval(k: KernelElement, x) -> float:
    x = np.asarray(x, dtype=float)
    r = math.sqrt(float(np.dot(x, x)))
    profile_value = float(kernel_profile(k.dim, k.index)(r))
    if k.index == 0:
        return profile_value
    return float(x[k.index - 1]) * profile_value


def residual_profile(profile: RadialProfile, dim: int, coordinate: bool = False) -> RadialProfile:
    """-Laplacian psi - p U^{p-1} psi for psi = h(s) or psi = x_i h(s)."""
    laplacian = profile.coordinate_laplacian(dim) if coordinate else profile.laplacian(dim)
    return -laplacian - potential_profile(dim) * profile


def profile_residual(profile: RadialProfile, dim: int, x, coordinate_index: Optional[int] = None) -> float:
    """Evaluate the linearized residual of h(s) (or x_i h(s) with 1-based i) at x."""
    x = np.asarray(x, dtype=float)
    r = math.sqrt(float(np.dot(x, x)))
    residual = residual_profile(profile, dim, coordinate=coordinate_index is not None)
    value = float(residual(r))
    if coordinate_index is None:
        return value
    return float(x[coordinate_index - 1]) * value


def linearized_residual(k: KernelElement, x) -> float:
    """-Laplacian psi^k - p U^{p-1} psi^k at x."""
    profile = kernel_profile(k.dim, k.index)
    return profile_residual(profile, k.dim, x, None if k.index == 0 else k.index)


def v_decay_envelope(x, dim: int, c_env: Optional[float] = None) -> float:
    """C_env (1 + |x|^2)^{-(N-4)/2}, the decay bound of the correction V."""
    if dim < 7:
        raise DimensionTooLow("decay envelope is defined for N >= 7", details={"dim": dim})
    c_env = V_ENVELOPE_CONSTANT if c_env is None else c_env
    x = np.asarray(x, dtype=float)
    return c_env * (1.0 + float(np.dot(x, x))) ** (-(dim - 4) / 2.0)


def kernel_elements(dim: int) -> List[KernelElement]:
    return [KernelElement(dim=dim, index=i) for i in range(dim + 1)]
