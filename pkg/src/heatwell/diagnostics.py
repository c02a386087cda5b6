"""Trajectory-level checks: energy ledger, M-functional relations, invariance.

M(s) = 1/2 int_0^s ||w||^2_{L^2(K)} dtau, so M' = ||w||^2/2 and, along the
flow, M'' = <w, w_s>_K = -I(w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .similarity import time_back
from .trace import RunOutcome, SimulationTrace, Verdict
from .weighted_space import Parameters


def m_functionals(trace: SimulationTrace) -> SimulationTrace:
    """Fill M (trapezoidal in s), M' = l2k_sq/2 and M'' = -I on every row."""
    rows = []
    m = 0.0
    prev = None
    for row in trace.rows:
        mp = 0.5 * row.l2k_sq
        if prev is not None:
            m += 0.5 * (row.s - prev.s) * (prev.m_prime + mp)
        new = replace(row, m=m, m_prime=mp, m_double_prime=0.0 - row.nehari)
        rows.append(new)
        prev = new
    return SimulationTrace(trace.params, rows, trace.checkpoints, trace.outcome)


def energy_ledger(trace: SimulationTrace) -> np.ndarray:
    """|E(u0) - E(w(s_k)) - int_0^{s_k} ||w_s||^2| for each row."""
    e0 = trace.rows[0].energy
    return np.array([abs(e0 - r.energy - r.dissipation_accum) for r in trace.rows])


def resolved_mask(trace: SimulationTrace, h: float, limit: float = 0.5) -> np.ndarray:
    """Rows whose concentration length sup|w|^{-(p-1)/2} is at least h/limit.

    Near blow-up the profile narrows below the grid spacing and every
    quadrature, the energy included, stops meaning anything.
    """
    q = 0.5 * (trace.params.p - 1.0)
    sup = np.array(trace.column("sup_norm"))
    return sup**q * h <= limit


def energy_monotone_violation(trace: SimulationTrace, mask: Optional[np.ndarray] = None) -> float:
    """Largest increase E(s_k) - min_{j<k} E(s_j) along the trace (0 if monotone).

    ``mask`` restricts the comparison to selected rows, e.g. :func:`resolved_mask`.
    """
    e = np.array(trace.column("energy"))
    if mask is not None:
        e = e[np.asarray(mask, dtype=bool)]
    if e.size < 2:
        return 0.0
    running_min = np.minimum.accumulate(e)
    return float(max(0.0, np.max(e[1:] - running_min[:-1])))


def m_prime_fd_residuals(trace: SimulationTrace, smooth_ratio: float = 1.1) -> tuple[np.ndarray, np.ndarray]:
    """Finite-difference check of M'' = -I.

    For each step k -> k+1 returns |dM'/ds + I_mid| with I_mid the average of
    the endpoint values, and the local scale dt * (max(|I_k|, |I_{k+1}|) + |dI/ds|).
    Steps whose sup-norm grows by more than ``smooth_ratio`` are skipped.
    """
    res, scale = [], []
    for a, b in zip(trace.rows, trace.rows[1:]):
        ds = b.s - a.s
        if ds <= 0:
            continue
        if a.sup_norm > 0 and b.sup_norm / a.sup_norm > smooth_ratio:
            continue
        slope = (b.m_prime - a.m_prime) / ds
        res.append(abs(slope + 0.5 * (a.nehari + b.nehari)))
        scale.append(ds * max(abs(a.nehari), abs(b.nehari)) + abs(b.nehari - a.nehari))
    return np.array(res), np.array(scale)


def epsilon_one(trace: SimulationTrace, d_est: float) -> float:
    """min(-I(u0), d_est - E(u0)) clipped at 0."""
    r0 = trace.rows[0]
    return max(0.0, min(-r0.nehari, d_est - r0.energy))


def first_s_prime(trace: SimulationTrace, params: Parameters) -> Optional[float]:
    """First recorded s where (n(p-1)-2)/4 * ||w||^2 > (p+1) E(u0)."""
    n, p = params.n, params.p
    coef = (n * (p - 1.0) - 2.0) / 4.0
    e0 = trace.rows[0].energy
    for r in trace.rows:
        if coef * r.l2k_sq > (p + 1.0) * e0:
            return r.s
    return None


def cauchy_schwarz_margins(trace: SimulationTrace, params: Parameters) -> np.ndarray:
    """M M'' - (p+1)/2 (M' - M'(0))^2 on rows at or after s'."""
    sp = first_s_prime(trace, params)
    if sp is None:
        return np.array([])
    mp0 = trace.rows[0].m_prime
    k = 0.5 * (params.p + 1.0)
    return np.array(
        [r.m * r.m_double_prime - k * (r.m_prime - mp0) ** 2 for r in trace.rows if r.s >= sp]
    )


@dataclass(frozen=True)
class InvarianceReport:
    initial_sign: int
    first_flip_s: Optional[float]
    expected_invariant: bool

    @property
    def ok(self) -> bool:
        return self.first_flip_s is None


def invariance_monitor(trace: SimulationTrace, mask: Optional[np.ndarray] = None) -> InvarianceReport:
    """First sign change of I(w(s)) relative to its sign at s = 0.

    With ``mask`` only the selected rows are scanned (see :func:`resolved_mask`).
    """
    sign0 = int(np.sign(trace.rows[0].nehari))
    cls = trace.outcome.classification if trace.outcome is not None else None
    expected = cls is not None and (cls.in_well or cls.exterior)
    if sign0 == 0:
        return InvarianceReport(0, None, expected)
    rows = trace.rows[1:]
    if mask is not None:
        rows = [r for r, keep in zip(trace.rows[1:], np.asarray(mask, dtype=bool)[1:]) if keep]
    for r in rows:
        if np.sign(r.nehari) != sign0:
            # an exactly vanishing I on a zero state is not a flip
            if r.nehari == 0.0 and r.sup_norm == 0.0:
                continue
            return InvarianceReport(sign0, r.s, expected)
    return InvarianceReport(sign0, None, expected)


def verdict(trace: SimulationTrace, params: Parameters) -> RunOutcome:
    """Final record: blow-up interval midpoint and T = e^{T_s} - 1, plus norm maxima."""
    raw = trace.outcome
    if raw is None:
        raise ValueError("trace carries no solver outcome")
    max_h1k = max(r.h1k_sq for r in trace.rows)
    max_sup = max(r.sup_norm for r in trace.rows)
    t_s = t = None
    interval = raw.T_s_interval
    if raw.verdict is Verdict.BLOWUP and interval is not None:
        t_s = 0.5 * (interval[0] + interval[1])
        t = time_back(t_s)
    return replace(
        raw,
        T_s=t_s,
        T=t,
        T_s_interval=interval if t_s is not None else None,
        max_h1k_sq=max_h1k if math.isfinite(max_h1k) else math.inf,
        max_sup_norm=max_sup,
    )
