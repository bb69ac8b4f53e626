"""
Warped products B x_f F with metric g_B + f^2 g_F.

A WarpedProductSpec is itself a chart, so products nest: the base or the fiber
may be another product. Coordinates are (u_B, u_F).
"""
import math
from typing import List, Literal, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.core.exceptions import ConfigInvalid, SingularMetric
from app.services.geometry.base import ManifoldChart


class Warping(BaseModel):
    """
    Positive function of the base coordinates.

    constant:  value
    affine:    value + slope * u[index]
    quadratic: value + slope * |u - center|^2
    sine:      value + amplitude * sin(frequency * u[index])
    """
    model_config = ConfigDict(frozen=True)

    kind: Literal["constant", "affine", "quadratic", "sine"] = "constant"
    value: float = 1.0
    slope: float = 0.0
    amplitude: float = 0.0
    frequency: float = 1.0
    index: int = Field(0, ge=0)
    center: List[float] = Field(default_factory=list)

    def __call__(self, u: np.ndarray) -> float:
        if self.kind == "constant":
            return self.value
        if self.kind == "affine":
            return self.value + self.slope * float(u[self.index])
        if self.kind == "quadratic":
            center = np.asarray(self.center, dtype=float) if self.center else np.zeros_like(u)
            return self.value + self.slope * float(np.sum((u - center) ** 2))
        return self.value + self.amplitude * math.sin(self.frequency * float(u[self.index]))

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"


class WarpedProductSpec(ManifoldChart):
    """Block metric diag(g_B(u_B), f(u_B)^2 g_F(u_F))."""

    def __init__(self, base: ManifoldChart, fiber: ManifoldChart, warping: Warping = Warping()):
        if warping.kind in ("affine", "sine") and warping.index >= base.dim:
            raise ConfigInvalid("warping index outside the base", details={"index": warping.index, "base_dim": base.dim})
        self.base = base
        self.fiber = fiber
        self.warping = warping

    @property
    def dim(self) -> int:
        return self.base.dim + self.fiber.dim

    @property
    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        base_lo, base_hi = self.base.bounds
        fiber_lo, fiber_hi = self.fiber.bounds
        return np.concatenate([base_lo, fiber_lo]), np.concatenate([base_hi, fiber_hi])

    @property
    def scale(self) -> float:
        return min(self.base.scale, self.fiber.scale)

    def factors(self) -> List[ManifoldChart]:
        return self.base.factors() + self.fiber.factors()

    def split(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return u[: self.base.dim], u[self.base.dim:]

    def metric(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        u_base, u_fiber = self.split(u)
        f = self.warping(u_base)
        if f <= 0.0:
            raise SingularMetric("warping function must be positive", details={"warping": f, "point": u.tolist()})
        nb = self.base.dim
        g = np.zeros((self.dim, self.dim))
        g[:nb, :nb] = self.base.metric(u_base)
        g[nb:, nb:] = f ** 2 * self.fiber.metric(u_fiber)
        return g


def product(charts: Sequence[ManifoldChart]) -> ManifoldChart:
    """Plain product (f = 1) of one or more charts, nested left to right."""
    charts = list(charts)
    if not charts:
        raise ConfigInvalid("a product needs at least one factor")
    result = charts[0]
    for chart in charts[1:]:
        result = WarpedProductSpec(result, chart)
    return result
