"""
Value types shared by the radial quadrature routines.
"""
import math
from typing import Callable, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

_LN10 = math.log(10.0)


class RadialInterval(BaseModel):
    """Radial shell [inner, outer); ``outer`` may be ``math.inf``."""
    model_config = ConfigDict(frozen=True)

    inner: float = Field(0.0, ge=0.0)
    outer: float = math.inf

    @model_validator(mode="after")
    def _check_order(self) -> "RadialInterval":
        if not self.inner < self.outer:
            raise ValueError(f"inner radius {self.inner} must be below outer radius {self.outer}")
        return self

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.outer)


class RadialIntegrand(BaseModel):
    """
    Radial function f(r) for r > 0.

    ``eval`` must accept and return numpy arrays. ``decay_exponent_hint`` is the
    power p with |f(r)| <~ r^{-p} as r -> infinity; it is required for
    unbounded shells.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    eval: Callable[[np.ndarray], np.ndarray]
    decay_exponent_hint: Optional[float] = None

    def __call__(self, r: np.ndarray) -> np.ndarray:
        return self.eval(r)


class QuadratureResult(BaseModel):
    """Result of one adaptive integration."""
    model_config = ConfigDict(frozen=True)

    value: float
    abs_error_estimate: float = Field(..., ge=0.0)
    evaluations: int = Field(..., gt=0)
    converged: bool = True


class ScaledValue(BaseModel):
    """
    Real number stored as mantissa * 10**log10_scale.

    Keeps tower quantities such as (mu_3/mu_2)^{5/2} ~ 1e-300 and beyond
    representable. The mantissa is normalised to 1 <= |mantissa| < 10, or 0.
    """
    model_config = ConfigDict(frozen=True)

    mantissa: float = 0.0
    log10_scale: int = 0

    @classmethod
    def normalized(cls, mantissa: float, log10_scale: int = 0) -> "ScaledValue":
        if not math.isfinite(mantissa):
            raise ValueError(f"cannot scale non-finite mantissa {mantissa}")
        if mantissa == 0.0:
            return cls()
        shift = math.floor(math.log10(abs(mantissa)))
        mantissa = mantissa / 10.0 ** shift
        if abs(mantissa) >= 10.0:
            mantissa /= 10.0
            shift += 1
        elif abs(mantissa) < 1.0:
            mantissa *= 10.0
            shift -= 1
        return cls(mantissa=mantissa, log10_scale=int(log10_scale + shift))

    @classmethod
    def from_float(cls, value: float) -> "ScaledValue":
        return cls.normalized(float(value))

    @classmethod
    def from_log(cls, ln_abs: float, sign: float = 1.0) -> "ScaledValue":
        """Build from the natural log of |value|."""
        if ln_abs == -math.inf or sign == 0.0:
            return cls()
        if not math.isfinite(ln_abs):
            raise ValueError(f"cannot scale log magnitude {ln_abs}")
        log10_abs = ln_abs / _LN10
        exponent = math.floor(log10_abs)
        return cls.normalized(math.copysign(10.0 ** (log10_abs - exponent), sign), exponent)

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0.0

    @property
    def sign(self) -> float:
        return 0.0 if self.is_zero else math.copysign(1.0, self.mantissa)

    def log10(self) -> float:
        """log10 of the magnitude (-inf for zero)."""
        if self.is_zero:
            return -math.inf
        return math.log10(abs(self.mantissa)) + self.log10_scale

    def ln(self) -> float:
        return self.log10() * _LN10

    def to_float(self) -> float:
        try:
            return self.mantissa * 10.0 ** self.log10_scale
        except OverflowError:
            return math.copysign(math.inf, self.mantissa)

    def __float__(self) -> float:
        return self.to_float()

    def _coerce(self, other: Union["ScaledValue", float, int]) -> "ScaledValue":
        if isinstance(other, ScaledValue):
            return other
        return ScaledValue.from_float(float(other))

    def __add__(self, other):
        other = self._coerce(other)
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        top = max(self.log10_scale, other.log10_scale)

        def aligned(v: "ScaledValue") -> float:
            gap = v.log10_scale - top
            return 0.0 if gap < -340 else v.mantissa * 10.0 ** gap

        return ScaledValue.normalized(aligned(self) + aligned(other), top)

    __radd__ = __add__

    def __neg__(self) -> "ScaledValue":
        return ScaledValue(mantissa=-self.mantissa, log10_scale=self.log10_scale)

    def __abs__(self) -> "ScaledValue":
        return ScaledValue(mantissa=abs(self.mantissa), log10_scale=self.log10_scale)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            return ScaledValue()
        return ScaledValue.normalized(self.mantissa * other.mantissa, self.log10_scale + other.log10_scale)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("division by a zero ScaledValue")
        if self.is_zero:
            return ScaledValue()
        return ScaledValue.normalized(self.mantissa / other.mantissa, self.log10_scale - other.log10_scale)

    def __pow__(self, exponent: float) -> "ScaledValue":
        if self.mantissa < 0.0:
            raise ValueError("only non-negative ScaledValues can be raised to real powers")
        if self.is_zero:
            return ScaledValue() if exponent > 0 else ScaledValue.from_float(1.0)
        return ScaledValue.from_log(exponent * self.ln())

    def __lt__(self, other) -> bool:
        return (self - other).mantissa < 0.0

    def __gt__(self, other) -> bool:
        return (self - other).mantissa > 0.0

    def relative_difference(self, other: "ScaledValue") -> float:
        """|self - other| / |other| as a plain float."""
        return abs(((self - other) / other).to_float())


class LogQuadratureResult(BaseModel):
    """Result of a log-space radial integration."""
    model_config = ConfigDict(frozen=True)

    value: ScaledValue
    rel_error_estimate: float = Field(..., ge=0.0)
    evaluations: int = Field(..., gt=0)
    converged: bool = True
