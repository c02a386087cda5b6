"""Radial grids, the Gaussian weight K(y) = exp(|y|^2/4) and weighted norms.

Every function of y in R^n is assumed radially symmetric and is stored as
nodal values on a uniform radial grid r_i = i*h, i = 0..N, truncated at
r_max with a homogeneous Dirichlet condition.  Integrals over R^n reduce to

    |S^{n-1}| * int_0^{r_max} g(r) r^{n-1} K(r) dr

Two sets of nodal weights live on the grid:

* ``mass``: trapezoid weights, used for every reported integral;
* ``volumes``: exact integrals of r^{n-1} K over the cells
  [r_i - h/2, r_i + h/2] (clipped to [0, r_max]).  These define the discrete
  inner product in which the finite-volume operator of :mod:`heatwell.solver`
  is symmetric, and keep that operator second order up to the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np

from .errors import NonFiniteError, ParameterError

R_MAX_LIMIT = 40.0
MIN_POINTS = 16


@dataclass(frozen=True)
class Parameters:
    """Dimension ``n`` and exponent ``p`` restricted to p_F < p < p_S."""

    n: int
    p: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ParameterError(f"n must be an integer (got {self.n!r})")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", float(self.p))
        if self.n < 3:
            raise ParameterError(f"n must satisfy n >= 3 (got {self.n})")
        if not (self.p_fujita < self.p < self.p_sobolev):
            raise ParameterError(
                f"p must satisfy 1+2/n < p < (n+2)/(n-2), i.e. "
                f"{self.p_fujita:.6g} < p < {self.p_sobolev:.6g} for n={self.n} "
                f"(got {self.p:g})"
            )

    @property
    def p_fujita(self) -> float:
        return 1.0 + 2.0 / self.n

    @property
    def p_sobolev(self) -> float:
        return (self.n + 2.0) / (self.n - 2.0)


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid on [0, r_max] with ``num_points`` intervals."""

    r_max: float
    num_points: int
    n: int

    def __post_init__(self):
        if not (self.r_max > 0):
            raise ParameterError(f"r_max must be > 0 (got {self.r_max})")
        if self.r_max > R_MAX_LIMIT:
            raise ParameterError(
                f"r_max must be <= {R_MAX_LIMIT:g} so that exp(r^2/4) stays finite "
                f"(got {self.r_max})"
            )
        if int(self.num_points) != self.num_points or self.num_points < MIN_POINTS:
            raise ParameterError(
                f"num_points must be an integer >= {MIN_POINTS} (got {self.num_points})"
            )
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be a positive integer (got {self.n})")
        object.__setattr__(self, "r_max", float(self.r_max))
        object.__setattr__(self, "num_points", int(self.num_points))
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def for_params(cls, params: Parameters, r_max: float = 16.0, num_points: int = 4096):
        return cls(r_max, num_points, params.n)

    @property
    def h(self) -> float:
        return self.r_max / self.num_points

    @property
    def size(self) -> int:
        return self.num_points + 1

    @cached_property
    def r(self) -> np.ndarray:
        r = np.arange(self.size, dtype=float) * self.h
        r.flags.writeable = False
        return r

    @cached_property
    def rho(self) -> np.ndarray:
        """Radial density r^{n-1} K(r) at the nodes."""
        out = self.r ** (self.n - 1) * weight_k(self.r)
        out.flags.writeable = False
        return out

    @cached_property
    def rho_half(self) -> np.ndarray:
        """Radial density at the cell midpoints r_{i+1/2}, i = 0..N-1."""
        rm = self.r[:-1] + 0.5 * self.h
        out = rm ** (self.n - 1) * weight_k(rm)
        out.flags.writeable = False
        return out

    @cached_property
    def mass(self) -> np.ndarray:
        """Trapezoid weights for int_0^{r_max} g(r) rho(r) dr."""
        m = self.rho * self.h
        m[0] *= 0.5
        m[-1] *= 0.5
        m.flags.writeable = False
        return m

    @cached_property
    def volumes(self) -> np.ndarray:
        """int of rho over each node's cell, by 8-point Gauss-Legendre per cell."""
        x, wq = np.polynomial.legendre.leggauss(8)
        lo = np.maximum(self.r - 0.5 * self.h, 0.0)
        hi = np.minimum(self.r + 0.5 * self.h, self.r_max)
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        pts = mid[:, None] + half[:, None] * x[None, :]
        vol = (half[:, None] * wq[None, :] * pts ** (self.n - 1) * weight_k(pts)).sum(axis=1)
        vol.flags.writeable = False
        return vol

    @cached_property
    def area(self) -> float:
        return sphere_area(self.n)


@dataclass(eq=False)
class Field:
    """Nodal values of a radial profile w(|y|) on ``grid``."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.size,):
            raise ParameterError(
                f"field needs {self.grid.size} values, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise NonFiniteError("field values must be finite")
        if v[-1] != 0.0:
            raise ParameterError("field must vanish at r_max (Dirichlet truncation)")
        v.flags.writeable = False
        self.values = v

    @classmethod
    def from_function(cls, grid: RadialGrid, f: Callable[[np.ndarray], np.ndarray]) -> "Field":
        v = np.asarray(f(grid.r), dtype=float).copy()
        v[-1] = 0.0
        return cls(grid, v)

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "Field":
        return cls(grid, np.zeros(grid.size))

    @classmethod
    def gaussian(cls, grid: RadialGrid, a: float, b: float = 1.0) -> "Field":
        """b * exp(-a r^2)."""
        return cls.from_function(grid, lambda r: b * np.exp(-a * r * r))

    def __mul__(self, b: float) -> "Field":
        return Field(self.grid, b * self.values)

    __rmul__ = __mul__

    def __add__(self, other: "Field") -> "Field":
        return Field(self.grid, self.values + other.values)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def is_zero(self) -> bool:
        return not np.any(self.values)


def weight_k(r):
    """exp(r^2/4); accepts scalars or arrays."""
    if np.isscalar(r):
        if r < 0:
            raise ParameterError(f"radius must be >= 0 (got {r})")
        return math.exp(r * r / 4.0)
    return np.exp(np.asarray(r, dtype=float) ** 2 / 4.0)


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    if n < 1:
        raise ParameterError(f"dimension must be >= 1 (got {n})")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def _finite(x: float, what: str) -> float:
    if not math.isfinite(x):
        raise NonFiniteError(f"{what} is not finite; the integrand outgrows the weight")
    return x


def integrate_weighted(g: Union[Field, np.ndarray], grid: RadialGrid | None = None) -> float:
    """Integral of the radial function g against K(y) dy over R^n.

    ``g`` is a Field or a raw nodal array (then ``grid`` is required); the
    integrand must already carry whatever power the caller needs.
    """
    if isinstance(g, Field):
        grid, vals = g.grid, g.values
    else:
        if grid is None:
            raise TypeError("grid is required for raw arrays")
        vals = np.asarray(g, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        total = grid.area * float(np.dot(grid.mass, vals))
    return _finite(total, "weighted integral")


def l2k_norm_sq(w: Field) -> float:
    return integrate_weighted(w.values * w.values, w.grid)


def dirichlet_form(w: Field) -> float:
    """Second-order flux sum  sum rho_{i+1/2} (w_{i+1}-w_i)^2 / h.

    Equals inner_volume(L_h w, w) exactly for the radial operator of the solver.
    """
    g = w.grid
    d = np.diff(w.values)
    with np.errstate(over="ignore", invalid="ignore"):
        total = g.area * float(np.dot(g.rho_half, d * d)) / g.h
    return _finite(total, "Dirichlet form")


def grad_l2k_sq(w: Field) -> float:
    """Weighted integral of |w'(r)|^2 with fourth-order accuracy.

    Richardson combination (4 G_h - G_2h)/3 of the midpoint-flux sum over
    neighbouring nodes and the node-centred sum over wide differences.  Both
    are symmetric positive forms, so the result is too.
    """
    g = w.grid
    v = w.values
    narrow = dirichlet_form(w)
    wide = (v[2:] - v[:-2]) / (2.0 * g.h)
    with np.errstate(over="ignore", invalid="ignore"):
        wide_sum = g.area * g.h * float(np.dot(g.rho[1:-1], wide * wide))
    return _finite((4.0 * narrow - wide_sum) / 3.0, "gradient integral")


def lp1k_norm(w: Field, params: Parameters) -> float:
    """int |w|^{p+1} K dy (the (p+1)-th power of the L^{p+1}(K) norm)."""
    return integrate_weighted(np.abs(w.values) ** (params.p + 1.0), w.grid)


def h1k_norm_sq(w: Field) -> float:
    return l2k_norm_sq(w) + grad_l2k_sq(w)


def kavian_ratio(w: Field) -> float:
    """grad_l2k_sq(w) / l2k_norm_sq(w); bounded below by n/2."""
    den = l2k_norm_sq(w)
    if den == 0.0:
        raise ZeroDivisionError("kavian_ratio of the zero field")
    return grad_l2k_sq(w) / den


def inner_volume(f: Field, g: Field) -> float:
    """Discrete L^2(K) inner product with the cell volumes (the operator's own)."""
    grid = f.grid
    return _finite(grid.area * float(np.dot(grid.volumes, f.values * g.values)), "inner product")
