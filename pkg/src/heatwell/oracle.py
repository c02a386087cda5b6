"""Closed-form weighted integrals for Gaussian profiles w = b exp(-a|y|^2).

With c = 2a - 1/4 > 0 and K = exp(|y|^2/4):

    int w^2 K dy          = b^2 (pi/c)^{n/2}
    int |grad w|^2 K dy   = b^2 * 2 a^2 n / c * (pi/c)^{n/2}
    int |w|^{p+1} K dy    = |b|^{p+1} (pi/((p+1)a - 1/4))^{n/2}

The gradient formula follows from |grad w|^2 = 4a^2|y|^2 w^2 and
int |y|^2 exp(-c|y|^2) dy = n/(2c) (pi/c)^{n/2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

# a within this distance of a threshold counts as divergent
_DIVERGENCE_MARGIN = 1e-9


@dataclass(frozen=True)
class GaussianSpec:
    a: float
    b: float
    n: int
    p: float

    def __post_init__(self):
        if self.a <= 0.125 + _DIVERGENCE_MARGIN:
            raise ParameterError(
                f"exp(-a r^2) with a = {self.a:g} is not in L^2(K): need a > 1/8"
            )
        if (self.p + 1.0) * self.a <= 0.25 + _DIVERGENCE_MARGIN:
            raise ParameterError(
                f"exp(-a r^2) with a = {self.a:g} is not in L^(p+1)(K): need (p+1)a > 1/4"
            )


@dataclass(frozen=True)
class GaussianMoments:
    l2k_sq: float
    grad_sq: float
    lp1: float


def gaussian_moments(spec: GaussianSpec) -> GaussianMoments:
    a, b, n, p = spec.a, spec.b, spec.n, spec.p
    c = 2.0 * a - 0.25
    base = (math.pi / c) ** (n / 2.0)
    l2 = b * b * base
    grad = b * b * 2.0 * a * a * n / c * base
    lp1 = abs(b) ** (p + 1.0) * (math.pi / ((p + 1.0) * a - 0.25)) ** (n / 2.0)
    return GaussianMoments(l2, grad, lp1)


def gaussian_energy_nehari(spec: GaussianSpec) -> tuple[float, float]:
    """Exact (E, I) for the Gaussian described by ``spec``."""
    m = gaussian_moments(spec)
    p = spec.p
    energy = 0.5 * m.grad_sq - m.l2k_sq / (2.0 * (p - 1.0)) - m.lp1 / (p + 1.0)
    nehari = m.grad_sq - m.l2k_sq / (p - 1.0) - m.lp1
    return energy, nehari
