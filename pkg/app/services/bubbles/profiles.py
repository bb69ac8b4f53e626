"""
Exact algebra of radial profiles h(s) = scale * sum_e c_e s^e with s = 1 + |x|^2.

Bubbles, kernel elements and their derivatives are all of this form with
rational exponents and coefficients, so Laplacians and linearized residuals
are assembled coefficient by coefficient in Fractions and like powers cancel
exactly before anything is evaluated in floating point.

For radial g = h(s):  Laplacian g = 2N h' + 4(s - 1) h''
For x_i h(s):         Laplacian (x_i h) = x_i (2N h' + 4(s - 1) h'' + 4 h')
"""
from fractions import Fraction
from typing import Dict, Iterable, Tuple, Union

import numpy as np

from app.services.quadrature.base import RadialIntegrand

Rational = Union[int, Fraction]


class RadialProfile:
    """Finite sum of rational powers of s = 1 + r^2 times a float scale."""

    __slots__ = ("terms", "scale")

    def __init__(self, terms: Dict[Fraction, Fraction], scale: float = 1.0):
        self.terms = {Fraction(e): Fraction(c) for e, c in terms.items() if c != 0}
        self.scale = float(scale)

    @classmethod
    def power(cls, exponent: Rational, coefficient: Rational = 1, scale: float = 1.0) -> "RadialProfile":
        return cls({Fraction(exponent): Fraction(coefficient)}, scale)

    @property
    def is_zero(self) -> bool:
        return not self.terms or self.scale == 0.0

    def items(self) -> Iterable[Tuple[Fraction, Fraction]]:
        return sorted(self.terms.items())

    def _check_scale(self, other: "RadialProfile") -> None:
        if self.scale != other.scale and not (self.is_zero or other.is_zero):
            raise ValueError("profiles with different scales cannot be added exactly")

    def __add__(self, other: "RadialProfile") -> "RadialProfile":
        self._check_scale(other)
        if self.is_zero:
            return other
        terms = dict(self.terms)
        for exponent, coefficient in other.terms.items():
            terms[exponent] = terms.get(exponent, Fraction(0)) + coefficient
        return RadialProfile(terms, self.scale)

    def __neg__(self) -> "RadialProfile":
        return RadialProfile({e: -c for e, c in self.terms.items()}, self.scale)

    def __sub__(self, other: "RadialProfile") -> "RadialProfile":
        return self + (-other)

    def __mul__(self, other: Union["RadialProfile", int, Fraction]) -> "RadialProfile":
        if not isinstance(other, RadialProfile):
            return RadialProfile({e: c * Fraction(other) for e, c in self.terms.items()}, self.scale)
        terms: Dict[Fraction, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                terms[e1 + e2] = terms.get(e1 + e2, Fraction(0)) + c1 * c2
        return RadialProfile(terms, self.scale * other.scale)

    __rmul__ = __mul__

    def times_s(self, exponent: Rational = 1) -> "RadialProfile":
        """Multiply by s^exponent."""
        return RadialProfile({e + exponent: c for e, c in self.terms.items()}, self.scale)

    def times_r_squared(self) -> "RadialProfile":
        """Multiply by r^2 = s - 1."""
        return self.times_s(1) - self

    def derivative(self) -> "RadialProfile":
        """d/ds."""
        return RadialProfile({e - 1: c * e for e, c in self.terms.items() if e != 0}, self.scale)

    def laplacian(self, dim: int) -> "RadialProfile":
        first = self.derivative()
        second = first.derivative()
        return first * (2 * dim) + second.times_r_squared() * 4

    def coordinate_laplacian(self, dim: int) -> "RadialProfile":
        """Profile L with Laplacian(x_i h) = x_i L."""
        return self.laplacian(dim) + self.derivative() * 4

    def radial_derivative_over_r(self) -> "RadialProfile":
        """(d/dr h) / r = 2 h'(s)."""
        return self.derivative() * 2

    def hessian_radial_part(self) -> "RadialProfile":
        """(h_rr - h_r / r) / r^2 = 4 h''(s)."""
        return self.derivative().derivative() * 4

    def decay_exponent(self) -> float:
        """p with |h| <~ r^{-p} for large r."""
        if self.is_zero:
            return float("inf")
        return -2.0 * float(max(self.terms))

    def __call__(self, r) -> np.ndarray:
        s = 1.0 + np.asarray(r, dtype=float) ** 2
        total = np.zeros_like(s)
        for exponent, coefficient in self.items():
            total = total + float(coefficient) * s ** float(exponent)
        return self.scale * total

    def as_integrand(self) -> RadialIntegrand:
        return RadialIntegrand(eval=self.__call__, decay_exponent_hint=self.decay_exponent())

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*s^({e})" for e, c in self.items()) or "0"
        return f"RadialProfile({self.scale!r} * [{body}])"
