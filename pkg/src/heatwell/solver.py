"""IMEX time stepping of the rescaled equation

    w_s + L w = |w|^{p-1} w + w/(p-1),    L = -K^{-1} div(K grad .)

on a radial grid.  L is discretized in finite-volume divergence form: fluxes
rho_{i+1/2} (w_{i+1} - w_i)/h divided by the cell volumes of
:mod:`heatwell.weighted_space`.  That makes L_h symmetric and positive in the
volume-weighted inner product and second order up to r = 0.  Each step
solves one tridiagonal system (I + dt L_h) w_new = w + dt (|w|^{p-1} w + w/(p-1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from . import diagnostics
from .errors import NonFiniteError, ParameterError, StepFailure
from .functionals import GaussianFamilySpec, classify_values, report, well_depth_upper
from .similarity import time_back
from .trace import RunOutcome, SimulationTrace, TraceRow, Verdict
from .weighted_space import Field, Parameters, RadialGrid, integrate_weighted

CALM_STEPS = 20


@dataclass(frozen=True)
class SolverConfig:
    dt_init: float = 1e-3
    dt_min: float = 1e-10
    s_max: float = 20.0
    blowup_threshold: float = 1e8
    growth_cap: float = 1.5
    record_every: int = 100

    def __post_init__(self):
        if not (0 < self.dt_min <= self.dt_init):
            raise ParameterError(
                f"need 0 < dt_min <= dt_init (got dt_min={self.dt_min}, dt_init={self.dt_init})"
            )
        if not self.s_max > 0:
            raise ParameterError(f"s_max must be > 0 (got {self.s_max})")
        if not self.blowup_threshold > 1:
            raise ParameterError(f"blowup_threshold must be > 1 (got {self.blowup_threshold})")
        if not self.growth_cap > 1:
            raise ParameterError(f"growth_cap must be > 1 (got {self.growth_cap})")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ParameterError(f"record_every must be a positive integer (got {self.record_every})")

    def refined(self, factor: float = 2.0) -> "SolverConfig":
        """Same run with dt_init and dt_min divided by ``factor``."""
        return SolverConfig(
            self.dt_init / factor,
            self.dt_min / factor,
            self.s_max,
            self.blowup_threshold,
            self.growth_cap,
            self.record_every,
        )


@lru_cache(maxsize=32)
def _bands(grid: RadialGrid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(sub, diag, super) of L_h acting on the unknowns at nodes 0..N-1.

    Row i is (F_{i+1/2} - F_{i-1/2}) / V_i with fluxes F = rho_{i+1/2} dw / h;
    F_{-1/2} = 0 encodes w'(0) = 0 and w_N = 0 is the Dirichlet condition.
    """
    N = grid.num_points
    m = grid.volumes[:N]
    c = grid.rho_half / grid.h  # c_i couples nodes i and i+1
    diag = c.copy()
    diag[1:] += c[:-1]
    diag /= m
    upper = -c[:-1] / m[:-1]
    lower = -c[:-1] / m[1:]
    for a in (diag, upper, lower):
        a.flags.writeable = False
    return lower, diag, upper


def apply_l(w: Field) -> Field:
    """Discrete L_h w; zero at r_max."""
    lower, diag, upper = _bands(w.grid)
    v = w.values[:-1]
    out = np.zeros(w.grid.size)
    out[:-1] = diag * v
    out[:-2] += upper * v[1:]
    out[1:-1] += lower * v[:-1]
    return Field(w.grid, out)


def step(
    w: Field,
    dt: float,
    params: Parameters,
    *,
    nonlinear: bool = True,
    linear_source: bool = True,
) -> Field:
    """One IMEX step.  The two flags switch source terms off for testing."""
    if not dt > 0:
        raise ParameterError(f"dt must be > 0 (got {dt})")
    v = w.values[:-1]
    rhs = v.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        if nonlinear:
            rhs += dt * np.abs(v) ** (params.p - 1.0) * v
        if linear_source:
            rhs += dt * v / (params.p - 1.0)
    if not np.all(np.isfinite(rhs)):
        raise StepFailure("non-finite right-hand side")
    lower, diag, upper = _bands(w.grid)
    ab = np.empty((3, v.size))
    ab[0, 0] = 0.0
    ab[0, 1:] = dt * upper
    ab[1] = 1.0 + dt * diag
    ab[2, :-1] = dt * lower
    ab[2, -1] = 0.0
    sol = solve_banded((1, 1), ab, rhs, check_finite=False)
    if not np.all(np.isfinite(sol)):
        raise StepFailure("non-finite solution")
    out = np.zeros(w.grid.size)
    out[:-1] = sol
    return Field(w.grid, out)


def _row(s: float, dt: float, rep, dissipation: float) -> TraceRow:
    return TraceRow(
        s=s,
        t=time_back(s),
        dt=dt,
        energy=rep.energy,
        nehari=rep.nehari,
        l2k_sq=rep.l2k_sq,
        sup_norm=rep.sup_norm,
        h1k_sq=rep.h1k_sq,
        dissipation_accum=dissipation,
    )


def evolve(
    u0: Field,
    params: Parameters,
    config: SolverConfig,
    d_est: Optional[float] = None,
) -> tuple[SimulationTrace, RunOutcome]:
    """Integrate from s = 0 until s_max or blow-up detection.

    ``d_est`` (the well-depth upper bound used to classify u0) defaults to the
    Gaussian-family estimate on u0's grid.
    """
    grid = u0.grid
    if grid.n != params.n:
        raise ParameterError(f"grid dimension {grid.n} does not match n = {params.n}")
    if d_est is None:
        d_est = well_depth_upper(GaussianFamilySpec(), params, grid).d_upper

    rep = report(u0, params)
    cls0 = classify_values(rep.energy, rep.nehari, d_est, zero=u0.is_zero())
    rows = [_row(0.0, 0.0, rep, 0.0)]
    checkpoints = [(0.0, u0)]

    s, dt, w = 0.0, config.dt_init, u0
    dissipation = 0.0
    calm = accepted = rejected = 0
    growing = False
    verdict, reason = None, ""
    interval = None
    while s < config.s_max:
        remaining = config.s_max - s
        # absorb a round-off remainder into the final step
        last = remaining <= dt + 1e-10 * config.s_max
        h = remaining if last else dt
        failure = ""
        try:
            w_new = step(w, h, params)
            sup_old, sup_new = w.sup_norm, w_new.sup_norm
            ratio = sup_new / sup_old if sup_old > 0 else (1.0 if sup_new == 0 else math.inf)
            if ratio > config.growth_cap:
                failure = "growth"
            else:
                rep = report(w_new, params)
        except NonFiniteError as exc:
            failure = f"non-finite state ({exc})"

        if failure:
            rejected += 1
            calm = 0
            if dt / 2.0 < config.dt_min:
                interval = (s, s + h)
                if failure == "growth" or growing:
                    verdict = Verdict.BLOWUP
                    reason = f"dt fell below dt_min={config.dt_min:g} while the sup-norm was growing"
                else:
                    verdict = Verdict.INCONCLUSIVE
                    reason = f"dt fell below dt_min without sup-norm growth: {failure}"
                    interval = None
                break
            dt /= 2.0
            continue

        dw = w_new.values - w.values
        dissipation += integrate_weighted(dw * dw, grid) / h
        growing = sup_new > sup_old
        s_prev, s = s, (config.s_max if last else s + h)
        w = w_new
        accepted += 1
        rows.append(_row(s, h, rep, dissipation))
        if accepted % config.record_every == 0:
            checkpoints.append((s, w))

        if sup_new > config.blowup_threshold:
            verdict = Verdict.BLOWUP
            reason = f"sup-norm exceeded blowup_threshold={config.blowup_threshold:g}"
            interval = (s_prev, s)
            break

        calm += 1
        if calm >= CALM_STEPS and dt < config.dt_init:
            dt = min(2.0 * dt, config.dt_init)
            calm = 0

    if checkpoints[-1][0] != s:
        checkpoints.append((s, w))

    if verdict is None:
        last = rows[-1]
        if last.sup_norm <= config.blowup_threshold and math.sqrt(last.h1k_sq) <= config.blowup_threshold:
            verdict, reason = Verdict.GLOBAL, "reached s_max with bounded norms"
        else:
            verdict, reason = Verdict.INCONCLUSIVE, "reached s_max with norms above threshold"

    raw = RunOutcome(
        classification=cls0,
        verdict=verdict,
        reason=reason,
        T_s_interval=interval if verdict is Verdict.BLOWUP else None,
        s_final=s,
        steps=accepted,
        rejected_steps=rejected,
        d_est=d_est,
    )
    trace = diagnostics.m_functionals(SimulationTrace(params, rows, checkpoints, raw))
    outcome = diagnostics.verdict(trace, params)
    trace.outcome = outcome
    return trace, outcome
