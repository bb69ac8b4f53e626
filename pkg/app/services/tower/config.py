"""
Tower configuration and the radial cutoff chi.
"""
import math
from typing import List, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.config import CUTOFF_PROFILE, CUTOFF_RADIUS
from app.core.logging_config import get_logger
from app.services.energy.schedule import ExponentSchedule, exponent_schedule

logger = get_logger(__name__)

CutoffProfile = Literal["smoothstep_quintic", "exp_bump"]


class CutoffSpec(BaseModel):
    """
    chi = 1 on [0, r0/2], chi = 0 on [r0, inf), smooth and monotone in between.

    smoothstep_quintic runs the C^2 quintic 6t^5 - 15t^4 + 10t^3 in
    t = (r^2/r0^2 - 1/4) / (3/4); exp_bump is the C^infinity transition
    a / (a + b), a = exp(-1/t), b = exp(-1/(1-t)) in t = 2r/r0 - 1.
    """
    model_config = ConfigDict(frozen=True)

    r0: float = Field(CUTOFF_RADIUS, gt=0.0)
    profile: CutoffProfile = CUTOFF_PROFILE

    def _transition(self, r: np.ndarray):
        """(t, dt/dr) with t clipped to [0, 1] and dt/dr zeroed outside the band."""
        r = np.asarray(r, dtype=float)
        if self.profile == "smoothstep_quintic":
            raw = (r ** 2 / self.r0 ** 2 - 0.25) / 0.75
            slope = 2.0 * r / (0.75 * self.r0 ** 2)
        else:
            raw = 2.0 * r / self.r0 - 1.0
            slope = np.full_like(r, 2.0 / self.r0)
        inside = (raw > 0.0) & (raw < 1.0)
        return np.clip(raw, 0.0, 1.0), np.where(inside, slope, 0.0)

    def _step(self, t: np.ndarray):
        """Rising step S(t) and S'(t) on [0, 1]."""
        if self.profile == "smoothstep_quintic":
            return t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2), 30.0 * t ** 2 * (1.0 - t) ** 2
        with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
            a = np.where(t > 0.0, np.exp(-1.0 / t), 0.0)
            b = np.where(t < 1.0, np.exp(-1.0 / (1.0 - t)), 0.0)
            total = a + b
            step = a / total
            rate = np.where(
                (t > 0.0) & (t < 1.0),
                a * b * (1.0 / t ** 2 + 1.0 / (1.0 - t) ** 2) / total ** 2,
                0.0,
            )
        return step, rate

    def value(self, r) -> np.ndarray:
        t, _ = self._transition(r)
        step, _ = self._step(t)
        return 1.0 - step

    def derivative(self, r) -> np.ndarray:
        """d chi / dr."""
        t, slope = self._transition(r)
        _, rate = self._step(t)
        return -rate * slope

    def log_value(self, r) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.value(r))


class TowerConfig(BaseModel):
    """
    A k-bubble tower in dimension N.

    ``r0`` and ``cutoff_profile`` may be passed instead of a full ``cutoff``.
    """
    model_config = ConfigDict(frozen=True)

    dim: int = Field(..., ge=7)
    k: int = Field(..., ge=1)
    d: List[float]
    eps: float = Field(..., gt=0.0)
    cutoff: CutoffSpec = Field(default_factory=CutoffSpec)
    include_v_envelope: bool = False

    @model_validator(mode="before")
    @classmethod
    def _fold_cutoff(cls, data):
        if isinstance(data, dict) and ("r0" in data or "cutoff_profile" in data):
            data = dict(data)
            cutoff = dict(data.pop("cutoff", None) or {})
            if "r0" in data:
                cutoff["r0"] = data.pop("r0")
            if "cutoff_profile" in data:
                cutoff["profile"] = data.pop("cutoff_profile")
            data["cutoff"] = cutoff
        return data

    @field_validator("d")
    @classmethod
    def _check_heights(cls, value: List[float]) -> List[float]:
        if any(not (h > 0.0 and math.isfinite(h)) for h in value):
            raise ValueError("tower heights must be positive and finite")
        return value

    @model_validator(mode="after")
    def _check_height_count(self) -> "TowerConfig":
        if len(self.d) != self.k:
            raise ValueError(f"expected {self.k} heights, got {len(self.d)}")
        log_mu_1 = math.log(self.d[0]) + 0.5 * math.log(self.eps)
        if log_mu_1 >= math.log(0.5 * self.r0):
            logger.warning(
                "Outermost bubble is not concentrated inside the cutoff",
                extra={"mu_1": math.exp(log_mu_1), "r0": self.r0},
            )
        return self

    @property
    def r0(self) -> float:
        return self.cutoff.r0

    @property
    def schedule(self) -> ExponentSchedule:
        return exponent_schedule(self.dim, self.k)

    @property
    def p(self) -> float:
        return (self.dim + 2) / (self.dim - 2)

    def with_eps(self, eps: float) -> "TowerConfig":
        return self.model_copy(update={"eps": eps})

    def with_heights(self, d: List[float]) -> "TowerConfig":
        return TowerConfig(
            dim=self.dim, k=self.k, d=list(d), eps=self.eps,
            cutoff=self.cutoff, include_v_envelope=self.include_v_envelope,
        )
