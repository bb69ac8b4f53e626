"""
Embedded charts of spheres and ellipsoids.

The metric of an embedded chart is the pullback J^T J of the Euclidean metric
through the analytic Jacobian of the embedding. Both ellipsoid charts cover
the south pole x_{n+1} = -a_{n+1}, so the same point can be evaluated twice.
"""
import math
from abc import abstractmethod
from typing import Sequence, Tuple

import numpy as np

from app.core.exceptions import ConfigInvalid, OutOfDomain
from app.services.geometry.base import ManifoldChart

ANGLE_MARGIN = 0.1
GRAPH_EXTENT = 0.7


class EmbeddedChart(ManifoldChart):
    """Chart given by an embedding u -> x in R^{n+1}."""

    @abstractmethod
    def embedding(self, u: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def jacobian(self, u: np.ndarray) -> np.ndarray:
        """dx/du, shape (n+1, n)."""
        pass

    @abstractmethod
    def locate(self, x: np.ndarray) -> np.ndarray:
        """Chart coordinates of an embedded point."""
        pass

    def metric(self, u: np.ndarray) -> np.ndarray:
        jac = self.jacobian(np.asarray(u, dtype=float))
        return jac.T @ jac


def _check_axes(axes: Sequence[float]) -> np.ndarray:
    axes = np.asarray(axes, dtype=float)
    if axes.ndim != 1 or axes.size < 2 or np.any(axes <= 0.0):
        raise ConfigInvalid("semi-axes must be at least two positive numbers", details={"axes": axes.tolist()})
    return axes


class EllipsoidGraph(EmbeddedChart):
    """
    Lower graph x_{n+1} = -a_{n+1} sqrt(1 - sum (u_i / a_i)^2) around the south pole.

    With equal semi-axes r this is the round sphere of radius r.
    """

    def __init__(self, axes: Sequence[float]):
        self.axes = _check_axes(axes)

    @property
    def dim(self) -> int:
        return self.axes.size - 1

    @property
    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        half = GRAPH_EXTENT / math.sqrt(self.dim) * self.axes[:-1]
        return -half, half

    @property
    def scale(self) -> float:
        return float(np.min(self.axes))

    def _height(self, u: np.ndarray) -> float:
        rest = 1.0 - float(np.sum((u / self.axes[:-1]) ** 2))
        if rest <= 0.0:
            raise OutOfDomain("point lies off the graph chart", details={"point": u.tolist()})
        return math.sqrt(rest)

    def embedding(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.append(u, -self.axes[-1] * self._height(u))

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        slope = self.axes[-1] * (u / self.axes[:-1] ** 2) / self._height(u)
        return np.vstack([np.eye(self.dim), slope])

    def locate(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x[-1] >= 0.0:
            raise OutOfDomain("graph chart covers the lower half only", details={"point": x.tolist()})
        return x[:-1].copy()


def hyperspherical(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Unit-sphere point and its Jacobian for angles (u_0, ..., u_{n-1}).

    y_k = sin u_0 ... sin u_{k-1} cos u_k for k < n and y_n = sin u_0 ... sin u_{n-1}.
    """
    n = u.size
    s = np.sin(u)
    c = np.cos(u)
    y = np.empty(n + 1)
    dy = np.zeros((n + 1, n))
    for k in range(n + 1):
        last = k == n
        prefix = np.prod(s[:k]) if not last else np.prod(s)
        y[k] = prefix if last else prefix * c[k]
        for j in range(min(k + 1, n)):
            if j < k or last:
                factors = np.delete(s[: n if last else k], j)
                d_prefix = c[j] * np.prod(factors)
                dy[k, j] = d_prefix if last else d_prefix * c[k]
            else:
                dy[k, j] = -prefix * s[k]
    return y, dy


class EllipsoidAngles(EmbeddedChart):
    """x = a * y(u) with hyperspherical angles, kept 0.1 away from the singular loci."""

    def __init__(self, axes: Sequence[float]):
        self.axes = _check_axes(axes)

    @property
    def dim(self) -> int:
        return self.axes.size - 1

    @property
    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        lo = np.full(self.dim, ANGLE_MARGIN)
        hi = np.full(self.dim, math.pi - ANGLE_MARGIN)
        hi[-1] = 2.0 * math.pi - ANGLE_MARGIN
        return lo, hi

    def embedding(self, u: np.ndarray) -> np.ndarray:
        y, _ = hyperspherical(np.asarray(u, dtype=float))
        return self.axes * y

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        _, dy = hyperspherical(np.asarray(u, dtype=float))
        return self.axes[:, None] * dy

    def locate(self, x: np.ndarray) -> np.ndarray:
        y = np.asarray(x, dtype=float) / self.axes
        y = y / np.linalg.norm(y)
        n = self.dim
        u = np.empty(n)
        for k in range(n - 1):
            tail = np.linalg.norm(y[k:])
            u[k] = math.acos(max(-1.0, min(1.0, y[k] / tail))) if tail > 0.0 else 0.0
        u[-1] = math.atan2(y[n], y[n - 1]) % (2.0 * math.pi)
        return u


def sphere_graph(dim: int, radius: float = 1.0) -> EllipsoidGraph:
    return EllipsoidGraph([radius] * (dim + 1))


def sphere_angles(dim: int, radius: float = 1.0) -> EllipsoidAngles:
    """Angular chart of S^n(radius); for n = 1 this is the circle."""
    return EllipsoidAngles([radius] * (dim + 1))
