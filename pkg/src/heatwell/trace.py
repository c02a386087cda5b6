"""Records produced along a rescaled-flow run."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .functionals import Classification
from .weighted_space import Field, Parameters


class Verdict(enum.Enum):
    GLOBAL = "Global"
    BLOWUP = "BlowUp"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True, slots=True)
class TraceRow:
    s: float
    t: float
    dt: float
    energy: float
    nehari: float
    l2k_sq: float
    sup_norm: float
    h1k_sq: float
    dissipation_accum: float
    m: float = 0.0
    m_prime: float = 0.0
    m_double_prime: float = 0.0


@dataclass(frozen=True)
class RunOutcome:
    classification: Classification
    verdict: Verdict
    reason: str = ""
    T_s: Optional[float] = None
    T: Optional[float] = None
    T_s_interval: Optional[tuple[float, float]] = None
    max_h1k_sq: float = 0.0
    max_sup_norm: float = 0.0
    s_final: float = 0.0
    steps: int = 0
    rejected_steps: int = 0
    d_est: float = 0.0


@dataclass
class SimulationTrace:
    params: Parameters
    rows: list[TraceRow]
    checkpoints: list[tuple[float, Field]] = field(default_factory=list)
    outcome: Optional[RunOutcome] = None

    def column(self, name: str) -> list[float]:
        return [getattr(r, name) for r in self.rows]
