"""
Curvature data at the blow-up point, in normal coordinates.

Index convention: R_{ijkl} with all indices down and R_{ijij} equal to the
sectional curvature of the (i, j) plane, so a round sphere of curvature K has
R_{ijkl} = K (delta_ik delta_jl - delta_il delta_jk). In normal coordinates
d_l Gamma^k_{ij} = -(R_{kijl} + R_{kjil}) / 3.
"""
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_serializer, field_validator, model_validator

from app.core.exceptions import SymmetryViolation

SYMMETRY_TOLERANCE = 1e-10


def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    """(h o k)_{ijkl} = h_ik k_jl + h_jl k_ik - h_il k_jk - h_jk k_il."""
    return (
        np.einsum("ik,jl->ijkl", h, k)
        + np.einsum("jl,ik->ijkl", h, k)
        - np.einsum("il,jk->ijkl", h, k)
        - np.einsum("jk,il->ijkl", h, k)
    )


def symmetry_defects(riemann: np.ndarray) -> dict:
    """Largest violation of each algebraic Riemann symmetry."""
    return {
        "antisymmetry_first_pair": float(np.max(np.abs(riemann + riemann.transpose(1, 0, 2, 3)))),
        "antisymmetry_second_pair": float(np.max(np.abs(riemann + riemann.transpose(0, 1, 3, 2)))),
        "pair_symmetry": float(np.max(np.abs(riemann - riemann.transpose(2, 3, 0, 1)))),
        "first_bianchi": float(np.max(np.abs(
            riemann + riemann.transpose(0, 2, 3, 1) + riemann.transpose(0, 3, 1, 2)
        ))),
    }


def project_algebraic(riemann: np.ndarray) -> np.ndarray:
    """Nearest tensor with the Riemann symmetries (pair symmetries, then Bianchi)."""
    r = 0.5 * (riemann - riemann.transpose(1, 0, 2, 3))
    r = 0.5 * (r - r.transpose(0, 1, 3, 2))
    r = 0.5 * (r + r.transpose(2, 3, 0, 1))
    cyclic = r + r.transpose(0, 2, 3, 1) + r.transpose(0, 3, 1, 2)
    return r - cyclic / 3.0


def normal_christoffel_derivs(riemann: np.ndarray) -> np.ndarray:
    """D[l, k, i] = d_l Gamma^k_{ii} = -(2/3) R_{kiil}."""
    return -(2.0 / 3.0) * np.einsum("kiil->lki", riemann)


class CurvatureData(BaseModel):
    """
    R_{iabj}(xi), d_l Gamma^k_{ii}(xi) and R_g(xi) feeding the solvability constant.

    JSON form stores both arrays flattened row-major with zero-based indices.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dim: int
    riemann: np.ndarray
    christoffel_derivs: np.ndarray
    scalar_curv: float

    @field_validator("riemann", "christoffel_derivs", mode="before")
    @classmethod
    def _as_array(cls, value):
        return np.asarray(value, dtype=float)

    @model_validator(mode="after")
    def _check_shapes(self) -> "CurvatureData":
        n = self.dim
        riemann = self.riemann.reshape((n,) * 4) if self.riemann.ndim == 1 else self.riemann
        derivs = self.christoffel_derivs.reshape((n,) * 3) if self.christoffel_derivs.ndim == 1 else self.christoffel_derivs
        if riemann.shape != (n,) * 4 or derivs.shape != (n,) * 3:
            raise ValueError("riemann must be N^4 and christoffel_derivs N^3")
        object.__setattr__(self, "riemann", riemann)
        object.__setattr__(self, "christoffel_derivs", derivs)
        check_symmetries(self)
        return self

    @field_serializer("riemann", "christoffel_derivs")
    def _flatten(self, value: np.ndarray) -> List[float]:
        return [float(v) for v in value.ravel(order="C")]

    def scaled(self, factor: float) -> "CurvatureData":
        return CurvatureData(
            dim=self.dim,
            riemann=factor * self.riemann,
            christoffel_derivs=factor * self.christoffel_derivs,
            scalar_curv=factor * self.scalar_curv,
        )


def check_symmetries(c: CurvatureData, tol: float = SYMMETRY_TOLERANCE) -> None:
    scale = max(1.0, float(np.max(np.abs(c.riemann))) if c.riemann.size else 1.0)
    defects = symmetry_defects(c.riemann)
    if max(defects.values()) > tol * scale:
        raise SymmetryViolation("Riemann data fails the algebraic symmetries", details=defects)


def from_riemann(riemann: np.ndarray, project: bool = False) -> CurvatureData:
    """Normal-coordinate curvature data determined by the Riemann tensor alone."""
    riemann = np.asarray(riemann, dtype=float)
    if project:
        riemann = project_algebraic(riemann)
    return CurvatureData(
        dim=riemann.shape[0],
        riemann=riemann,
        christoffel_derivs=normal_christoffel_derivs(riemann),
        scalar_curv=float(np.einsum("ijij->", riemann)),
    )


def flat(dim: int) -> CurvatureData:
    return from_riemann(np.zeros((dim,) * 4))


def constant_curvature(dim: int, curvature: float = 1.0) -> CurvatureData:
    identity = np.eye(dim)
    return from_riemann(0.5 * curvature * kulkarni_nomizu(identity, identity))


def product_of_spheres(dims: Sequence[int], radii: Optional[Sequence[float]] = None) -> CurvatureData:
    """Block-diagonal curvature of S^{n_1}(r_1) x S^{n_2}(r_2) x ... at any point."""
    radii = list(radii) if radii is not None else [1.0] * len(dims)
    total = int(sum(dims))
    riemann = np.zeros((total,) * 4)
    start = 0
    for n, radius in zip(dims, radii):
        block = slice(start, start + n)
        identity = np.eye(n)
        riemann[block, block, block, block] = 0.5 * kulkarni_nomizu(identity, identity) / radius ** 2
        start += n
    return from_riemann(riemann)


def random_algebraic(dim: int, seed: int = 0, terms: int = 3) -> CurvatureData:
    """Random algebraic curvature tensor: sum of Kulkarni-Nomizu products of symmetric matrices."""
    rng = np.random.default_rng(seed)
    riemann = np.zeros((dim,) * 4)
    for _ in range(terms):
        a = rng.standard_normal((dim, dim))
        b = rng.standard_normal((dim, dim))
        riemann += kulkarni_nomizu(0.5 * (a + a.T), 0.5 * (b + b.T))
    return from_riemann(riemann / terms)
