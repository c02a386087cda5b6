"""Energy and Nehari functionals, scaling rays and well-depth estimates.

For a fixed nonzero profile w the two functionals restricted to the ray
b -> b*w are polynomials in b:

    I(bw) = b^2 Q - b^{p+1} A
    E(bw) = b^2 Q / 2 - b^{p+1} A / (p+1)

with Q = ||grad w||^2 - ||w||^2/(p-1) and A = ||w||_{p+1}^{p+1} (weighted
norms).  Everything below is built on these two numbers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import BracketError, ParameterError
from .weighted_space import (
    Field,
    Parameters,
    RadialGrid,
    grad_l2k_sq,
    l2k_norm_sq,
    lp1k_norm,
)

BISECT_TOL = 1e-12
BISECT_MAX_ITER = 200
MAX_DOUBLINGS = 60


@dataclass(frozen=True)
class FunctionalReport:
    l2k_sq: float
    grad_sq: float
    lp1: float
    energy: float
    nehari: float
    sup_norm: float

    @property
    def h1k_sq(self) -> float:
        return self.l2k_sq + self.grad_sq


def energy_from_parts(grad_sq: float, l2k_sq: float, lp1: float, p: float) -> float:
    return 0.5 * grad_sq - l2k_sq / (2.0 * (p - 1.0)) - lp1 / (p + 1.0)


def nehari_from_parts(grad_sq: float, l2k_sq: float, lp1: float, p: float) -> float:
    return grad_sq - l2k_sq / (p - 1.0) - lp1


def report(w: Field, params: Parameters) -> FunctionalReport:
    l2 = l2k_norm_sq(w)
    grad = grad_l2k_sq(w)
    lp1 = lp1k_norm(w, params)
    return FunctionalReport(
        l2k_sq=l2,
        grad_sq=grad,
        lp1=lp1,
        energy=energy_from_parts(grad, l2, lp1, params.p),
        nehari=nehari_from_parts(grad, l2, lp1, params.p),
        sup_norm=w.sup_norm,
    )


@dataclass(frozen=True)
class NehariScaling:
    q_coeff: float
    a_coeff: float
    b_star: float
    p: float

    def nehari(self, b: float) -> float:
        return b * b * self.q_coeff - abs(b) ** (self.p + 1.0) * self.a_coeff

    def energy(self, b: float) -> float:
        return 0.5 * b * b * self.q_coeff - abs(b) ** (self.p + 1.0) * self.a_coeff / (self.p + 1.0)

    @property
    def nehari_energy(self) -> float:
        """E(b* w), via E = (p-1)/(2(p+1)) * ||b* w||_{p+1}^{p+1} on the Nehari manifold."""
        p = self.p
        return (p - 1.0) / (2.0 * (p + 1.0)) * self.b_star ** (p + 1.0) * self.a_coeff


def _scaling_from_parts(q: float, a: float, p: float) -> NehariScaling:
    if a == 0.0:
        raise ParameterError("Nehari scaling of the zero field")
    if q <= 0.0:
        raise ParameterError(
            f"quadratic coefficient Q = {q:g} <= 0: the field is under-resolved "
            "or does not decay fast enough for H^1(K)"
        )
    return NehariScaling(q, a, (q / a) ** (1.0 / (p - 1.0)), p)


def nehari_scaling(w: Field, params: Parameters) -> NehariScaling:
    if w.is_zero():
        raise ParameterError("Nehari scaling of the zero field")
    q = grad_l2k_sq(w) - l2k_norm_sq(w) / (params.p - 1.0)
    return _scaling_from_parts(q, lp1k_norm(w, params), params.p)


def energy_on_ray(
    w: Field, params: Parameters, b_values: Iterable[float]
) -> list[tuple[float, float, float]]:
    """(b, E(bw), I(bw)) for each b, using cached Q and A."""
    sc = nehari_scaling(w, params)
    return [(float(b), sc.energy(b), sc.nehari(b)) for b in b_values]


def bisect(f, lo: float, hi: float, tol: float = BISECT_TOL, max_iter: int = BISECT_MAX_ITER) -> float:
    """Root of f in [lo, hi] given f(lo) and f(hi) of opposite sign."""
    flo = f(lo)
    if flo == 0.0:
        return lo
    if f(hi) == 0.0:
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def nehari_root_bisect(sc: NehariScaling) -> float:
    """Positive root of I(bw) = 0 by bisection; cross-check for the closed form."""
    hi = 1.0
    for _ in range(MAX_DOUBLINGS):
        if sc.nehari(hi) < 0:
            break
        hi *= 2.0
    else:
        raise BracketError("no sign change of I(bw) found")
    lo = hi / 2.0
    while sc.nehari(lo) <= 0 and lo > 1e-300:
        lo /= 2.0
    return bisect(sc.nehari, lo, hi)


@dataclass(frozen=True)
class GaussianFamilySpec:
    """Profiles exp(-a r^2) for ``a_count`` values of a spaced evenly on [a_min, a_max]."""

    a_min: float = 0.15
    a_max: float = 3.0
    a_count: int = 20

    def __post_init__(self):
        if self.a_count < 0:
            raise ParameterError(f"a_count must be >= 0 (got {self.a_count})")
        if self.a_count > 0 and self.a_min <= 0.125:
            raise ParameterError(f"a_min must exceed 1/8 (got {self.a_min})")
        if self.a_max < self.a_min:
            raise ParameterError("a_max must be >= a_min")

    @property
    def a_values(self) -> np.ndarray:
        if self.a_count == 1:
            return np.array([self.a_min])
        return np.linspace(self.a_min, self.a_max, self.a_count)

    def refined(self) -> "GaussianFamilySpec":
        """Same interval with the spacing halved (a superset of this family)."""
        if self.a_count <= 1:
            return self
        return GaussianFamilySpec(self.a_min, self.a_max, 2 * self.a_count - 1)


@dataclass(frozen=True)
class WellEstimate:
    d_upper: float
    minimizing_a: float
    family_size: int


def _family_scalings(family: GaussianFamilySpec, params: Parameters, grid: Optional[RadialGrid]):
    if family.a_count == 0:
        raise ParameterError("well-depth family is empty")
    if grid is None:
        grid = RadialGrid.for_params(params)
    for a in family.a_values:
        yield float(a), nehari_scaling(Field.gaussian(grid, a), params)


def well_depth_upper(
    family: GaussianFamilySpec, params: Parameters, grid: Optional[RadialGrid] = None
) -> WellEstimate:
    """Minimum of E over the Nehari points of the family: an upper bound for d."""
    best = None
    for a, sc in _family_scalings(family, params, grid):
        e = sc.nehari_energy
        if best is None or e < best[0]:
            best = (e, a)
    return WellEstimate(best[0], best[1], family.a_count)


def eps_root(sc: NehariScaling, eps: float) -> float:
    """Root b > b* of I(bw) = -eps."""
    if not eps > 0:
        raise ParameterError(f"eps must be > 0 (got {eps})")
    f = lambda b: sc.nehari(b) + eps
    lo = sc.b_star
    hi = 2.0 * lo
    for _ in range(MAX_DOUBLINGS):
        if f(hi) < 0:
            break
        hi *= 2.0
    else:
        raise BracketError(f"I(bw) = -{eps:g} not bracketed after {MAX_DOUBLINGS} doublings")
    return bisect(f, lo, hi)


def d_eps_upper(
    family: GaussianFamilySpec,
    params: Parameters,
    eps: float,
    grid: Optional[RadialGrid] = None,
) -> float:
    """Family minimum of E(bw) on the level set I(bw) = -eps."""
    return min(sc.energy(eps_root(sc, eps)) for _, sc in _family_scalings(family, params, grid))


class Classification(enum.Enum):
    ZERO = "Zero"
    IN_WELL_HEURISTIC = "InWellHeuristic"
    EXTERIOR_HEURISTIC = "ExteriorHeuristic"
    EXTERIOR_CERTIFIED = "ExteriorCertified"
    INDETERMINATE = "Indeterminate"

    @property
    def rigorous(self) -> bool:
        # heuristic labels lean on an upper bound of d, not on d itself
        return self in (Classification.ZERO, Classification.EXTERIOR_CERTIFIED)

    @property
    def in_well(self) -> bool:
        return self in (Classification.ZERO, Classification.IN_WELL_HEURISTIC)

    @property
    def exterior(self) -> bool:
        return self in (Classification.EXTERIOR_CERTIFIED, Classification.EXTERIOR_HEURISTIC)


def classify_values(energy: float, nehari: float, d_est: float, zero: bool = False) -> Classification:
    if not d_est > 0:
        raise ParameterError(f"d_est must be > 0 (got {d_est})")
    if zero:
        return Classification.ZERO
    if energy <= 0 and nehari < 0:
        return Classification.EXTERIOR_CERTIFIED
    if 0 < energy < d_est and nehari > 0:
        return Classification.IN_WELL_HEURISTIC
    if energy < d_est and nehari < 0:
        return Classification.EXTERIOR_HEURISTIC
    return Classification.INDETERMINATE


def classify(w: Field, params: Parameters, d_est: float) -> Classification:
    if not d_est > 0:
        raise ParameterError(f"d_est must be > 0 (got {d_est})")
    if w.is_zero():
        return Classification.ZERO
    rep = report(w, params)
    return classify_values(rep.energy, rep.nehari, d_est)


def depth_eps_rows(
    family: GaussianFamilySpec,
    params: Parameters,
    eps_values: Sequence[float],
    grid: Optional[RadialGrid] = None,
    tol: float = 1e-6,
) -> tuple[WellEstimate, list[dict]]:
    """Same-family check d_upper <= d_eps_upper(eps) + eps/2 + tol for each eps."""
    est = well_depth_upper(family, params, grid)
    rows = []
    for eps in eps_values:
        de = d_eps_upper(family, params, eps, grid)
        rhs = de + eps / 2.0
        rows.append(
            {"eps": float(eps), "d_eps_upper": de, "rhs": rhs, "pass": bool(est.d_upper <= rhs + tol)}
        )
    return est, rows


def nehari_residual_scale(sc: NehariScaling) -> float:
    b = sc.b_star
    return sc.q_coeff * b * b + sc.a_coeff * b ** (sc.p + 1.0)


__all__ = [
    "Classification",
    "FunctionalReport",
    "GaussianFamilySpec",
    "NehariScaling",
    "WellEstimate",
    "classify",
    "classify_values",
    "d_eps_upper",
    "energy_on_ray",
    "eps_root",
    "depth_eps_rows",
    "nehari_root_bisect",
    "nehari_scaling",
    "report",
    "well_depth_upper",
]
