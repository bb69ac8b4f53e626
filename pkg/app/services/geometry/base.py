"""
Base chart interface.
"""
from abc import ABC, abstractmethod
from typing import List, Optional, Tuple

import numpy as np

from app.core.exceptions import OutOfDomain, SingularMetric

MIN_METRIC_EIGENVALUE = 1e-10


class ManifoldChart(ABC):
    """A coordinate box carrying a Riemannian metric g_ij(u)."""

    @property
    @abstractmethod
    def dim(self) -> int:
        pass

    @property
    @abstractmethod
    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        """Lower and upper corners of the coordinate box."""
        pass

    @abstractmethod
    def metric(self, u: np.ndarray) -> np.ndarray:
        """
        Metric matrix at ``u``, without domain or definiteness checks.

        Args:
            u: chart coordinates, shape (dim,)

        Returns:
            (dim, dim) symmetric matrix
        """
        pass

    @property
    def scale(self) -> float:
        """Typical coordinate length, used to size finite-difference steps."""
        return 1.0

    @property
    def center(self) -> np.ndarray:
        lo, hi = self.bounds
        return 0.5 * (lo + hi)

    def factors(self) -> List["ManifoldChart"]:
        """Leaf charts of a (possibly nested) product, in coordinate order."""
        return [self]

    def margin(self, u: np.ndarray) -> float:
        """Distance from ``u`` to the boundary of the box (negative outside)."""
        lo, hi = self.bounds
        return float(np.min(np.minimum(u - lo, hi - u)))

    def check_domain(self, u: np.ndarray, margin: float = 0.0) -> None:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            raise OutOfDomain("coordinate vector has the wrong length", details={"expected": self.dim, "got": list(u.shape)})
        available = self.margin(u)
        if available < margin:
            raise OutOfDomain(
                "point too close to the chart boundary",
                details={"point": u.tolist(), "margin": available, "required": margin},
            )

    def sample(self, rng: np.random.Generator, count: int, shrink: float = 1.0) -> np.ndarray:
        """``count`` uniform points of the box shrunk by ``shrink`` about its center."""
        lo, hi = self.bounds
        center = self.center
        points = rng.uniform(lo, hi, size=(count, self.dim))
        return center + shrink * (points - center)


class FlatBox(ManifoldChart):
    """Euclidean space on [-half_width, half_width]^n."""

    def __init__(self, dim: int, half_width: float = 1.0):
        self._dim = dim
        self.half_width = half_width

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return -self.half_width * np.ones(self._dim), self.half_width * np.ones(self._dim)

    def metric(self, u: np.ndarray) -> np.ndarray:
        return np.eye(self._dim)


def check_metric(g: np.ndarray, u: Optional[np.ndarray] = None) -> np.ndarray:
    """Symmetrize ``g`` and require it to be positive definite."""
    g = 0.5 * (g + g.T)
    lowest = float(np.linalg.eigvalsh(g)[0])
    if lowest <= MIN_METRIC_EIGENVALUE:
        raise SingularMetric(
            "metric is not positive definite",
            details={"min_eigenvalue": lowest, "point": None if u is None else np.asarray(u).tolist()},
        )
    return g


def metric_at(chart: ManifoldChart, u) -> np.ndarray:
    """
    Metric at ``u`` after domain and definiteness checks.

    Raises:
        OutOfDomain: u outside the coordinate box
        SingularMetric: smallest eigenvalue <= 1e-10
    """
    u = np.asarray(u, dtype=float)
    chart.check_domain(u)
    return check_metric(chart.metric(u), u)
