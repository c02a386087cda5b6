"""Potential-well laboratory for u_t - Laplacian u = |u|^{p-1} u in forward similarity variables."""

from .functionals import (
    Classification,
    FunctionalReport,
    GaussianFamilySpec,
    NehariScaling,
    WellEstimate,
    classify,
    d_eps_upper,
    energy_on_ray,
    nehari_scaling,
    report,
    well_depth_upper,
)
from .similarity import rescale, time_back, time_forward, unrescale
from .solver import SolverConfig, apply_l, evolve, step
from .trace import RunOutcome, SimulationTrace, TraceRow, Verdict
from .weighted_space import Field, Parameters, RadialGrid

__version__ = "0.1.0"
