"""Forward self-similar change of variables.

    s = log(1+t),   y = x / sqrt(1+t),   w(y, s) = (1+t)^{1/(p-1)} u(x, t)

so a maximal time T of u corresponds to T_s = log(1+T).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError
from .weighted_space import Field, Parameters


def time_forward(t: float) -> float:
    if t < 0:
        raise ParameterError(f"t must be >= 0 (got {t})")
    return math.log1p(t)


def time_back(s: float) -> float:
    if s < 0:
        raise ParameterError(f"s must be >= 0 (got {s})")
    return math.expm1(s)


def _resample(field: Field, radii: np.ndarray) -> np.ndarray:
    r = field.grid.r
    # zero beyond the truncation radius
    return np.interp(radii, r, field.values, right=0.0)


def unrescale(w: Field, s: float, params: Parameters) -> tuple[float, Field]:
    """Original-variable profile u(., t) at t = e^s - 1, on the same radial nodes.

    u(x, t) = (1+t)^{-1/(p-1)} w(x / sqrt(1+t)), with w linearly interpolated.
    """
    t = time_back(s)
    if s == 0:
        return 0.0, w
    scale = math.exp(-s / (params.p - 1.0))
    y = w.grid.r * math.exp(-s / 2.0)
    vals = scale * _resample(w, y)
    vals[-1] = 0.0
    return t, Field(w.grid, vals)


def rescale(u: Field, t: float, params: Parameters) -> tuple[float, Field]:
    """Inverse of :func:`unrescale`: w(y, s) = (1+t)^{1/(p-1)} u(sqrt(1+t) y)."""
    s = time_forward(t)
    if t == 0:
        return 0.0, u
    scale = (1.0 + t) ** (1.0 / (params.p - 1.0))
    x = u.grid.r * math.sqrt(1.0 + t)
    vals = scale * _resample(u, x)
    vals[-1] = 0.0
    return s, Field(u.grid, vals)
