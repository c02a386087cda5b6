"""JSON experiment configuration.

Schema (every section optional; defaults shown)::

    {
      "params":     {"n": 3, "p": 3.0},
      "grid":       {"r_max": 16.0, "num_points": 1024},
      "solver":     {"dt_init": 1e-3, "dt_min": 1e-10, "s_max": 20.0,
                     "blowup_threshold": 1e8, "growth_cap": 1.5, "record_every": 100},
      "initial":    {"family": "gaussian", "a": 0.5, "b": 0.5},
      "sweep":      {"a": [0.5], "b": [0.25, 0.5, 1.0]}
                    or {"a": [0.5], "b_log": {"min": 0.1, "max": 10, "count": 9}},
      "well_depth": {"a_min": 0.15, "a_max": 3.0, "a_count": 20, "eps": [0.01, 0.1, 0.5]},
      "check":      {"mixtures": 100},
      "output":     {"dir": "out"},
      "seed": 0
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .errors import ParameterError
from .functionals import GaussianFamilySpec
from .oracle import GaussianSpec
from .solver import SolverConfig
from .weighted_space import Parameters, RadialGrid


class ConfigError(ValueError):
    """Configuration rejected; the message names the offending field."""


_SECTIONS = {
    "params": {"n", "p"},
    "grid": {"r_max", "num_points"},
    "solver": {"dt_init", "dt_min", "s_max", "blowup_threshold", "growth_cap", "record_every"},
    "initial": {"family", "a", "b"},
    "sweep": {"a", "b", "b_log"},
    "well_depth": {"a_min", "a_max", "a_count", "eps"},
    "check": {"mixtures"},
    "output": {"dir"},
    "seed": None,
}


@dataclass(frozen=True)
class InitialDatum:
    family: str = "gaussian"
    a: float = 0.5
    b: float = 0.5


@dataclass(frozen=True)
class SweepSpec:
    a_values: tuple[float, ...] = (0.5,)
    b_values: tuple[float, ...] = ()


@dataclass(frozen=True)
class ExperimentConfig:
    params: Parameters = field(default_factory=lambda: Parameters(3, 3.0))
    grid: RadialGrid = field(default_factory=lambda: RadialGrid(16.0, 1024, 3))
    solver: SolverConfig = field(default_factory=SolverConfig)
    initial: InitialDatum = field(default_factory=InitialDatum)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    family: GaussianFamilySpec = field(default_factory=GaussianFamilySpec)
    eps_values: tuple[float, ...] = (0.01, 0.1, 0.5)
    mixtures: int = 100
    output_dir: Path = Path("out")
    seed: int = 0


def _section(doc: dict, name: str) -> dict:
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: expected an object, got {type(sec).__name__}")
    unknown = set(sec) - _SECTIONS[name]
    if unknown:
        raise ConfigError(f"{name}.{sorted(unknown)[0]}: unknown field")
    return sec


def _number(sec: dict, section: str, key: str, default: Any, integer: bool = False):
    val = sec.get(key, default)
    path = f"{section}.{key}"
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {val!r}")
    if integer:
        if int(val) != val:
            raise ConfigError(f"{path}: expected an integer, got {val!r}")
        return int(val)
    return float(val)


def _number_list(sec: dict, section: str, key: str, default) -> tuple[float, ...]:
    val = sec.get(key, default)
    path = f"{section}.{key}"
    if not isinstance(val, list):
        raise ConfigError(f"{path}: expected a list of numbers")
    for i, x in enumerate(val):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ConfigError(f"{path}[{i}]: expected a number, got {x!r}")
    return tuple(float(x) for x in val)


def _wrap(path: str, fn, *args):
    try:
        return fn(*args)
    except ParameterError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def parse_config(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be a JSON object")
    unknown = set(doc) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown section")

    sec = _section(doc, "params")
    n = _number(sec, "params", "n", 3, integer=True)
    p = _number(sec, "params", "p", 3.0)
    params = _wrap("params", Parameters, n, p)

    sec = _section(doc, "grid")
    grid = _wrap(
        "grid",
        RadialGrid,
        _number(sec, "grid", "r_max", 16.0),
        _number(sec, "grid", "num_points", 1024, integer=True),
        params.n,
    )

    sec = _section(doc, "solver")
    d = SolverConfig()
    solver = _wrap(
        "solver",
        SolverConfig,
        _number(sec, "solver", "dt_init", d.dt_init),
        _number(sec, "solver", "dt_min", d.dt_min),
        _number(sec, "solver", "s_max", d.s_max),
        _number(sec, "solver", "blowup_threshold", d.blowup_threshold),
        _number(sec, "solver", "growth_cap", d.growth_cap),
        _number(sec, "solver", "record_every", d.record_every, integer=True),
    )

    sec = _section(doc, "initial")
    family_name = sec.get("family", "gaussian")
    if family_name != "gaussian":
        raise ConfigError(f"initial.family: only 'gaussian' is supported, got {family_name!r}")
    initial = InitialDatum(
        "gaussian", _number(sec, "initial", "a", 0.5), _number(sec, "initial", "b", 0.5)
    )
    _check_gaussian("initial.a", initial.a, params)

    sec = _section(doc, "sweep")
    a_values = _number_list(sec, "sweep", "a", [0.5])
    if "b" in sec and "b_log" in sec:
        raise ConfigError("sweep.b_log: give either sweep.b or sweep.b_log, not both")
    if "b_log" in sec:
        bl = sec["b_log"]
        if not isinstance(bl, dict) or set(bl) - {"min", "max", "count"}:
            raise ConfigError("sweep.b_log: expected {min, max, count}")
        lo = _number(bl, "sweep.b_log", "min", None)
        hi = _number(bl, "sweep.b_log", "max", None)
        count = _number(bl, "sweep.b_log", "count", None, integer=True)
        if not (0 < lo <= hi) or count < 0:
            raise ConfigError("sweep.b_log: need 0 < min <= max and count >= 0")
        b_values = tuple(float(x) for x in np.geomspace(lo, hi, count)) if count else ()
    else:
        b_values = _number_list(sec, "sweep", "b", [])
    for i, a in enumerate(a_values):
        _check_gaussian(f"sweep.a[{i}]", a, params)
    sweep = SweepSpec(a_values, b_values)

    sec = _section(doc, "well_depth")
    fam_d = GaussianFamilySpec()
    family = _wrap(
        "well_depth",
        GaussianFamilySpec,
        _number(sec, "well_depth", "a_min", fam_d.a_min),
        _number(sec, "well_depth", "a_max", fam_d.a_max),
        _number(sec, "well_depth", "a_count", fam_d.a_count, integer=True),
    )
    eps_values = _number_list(sec, "well_depth", "eps", [0.01, 0.1, 0.5])
    for i, e in enumerate(eps_values):
        if not e > 0:
            raise ConfigError(f"well_depth.eps[{i}]: must be > 0 (got {e:g})")

    sec = _section(doc, "check")
    mixtures = _number(sec, "check", "mixtures", 100, integer=True)
    if mixtures < 0:
        raise ConfigError("check.mixtures: must be >= 0")

    sec = _section(doc, "output")
    out_dir = sec.get("dir", "out")
    if not isinstance(out_dir, str):
        raise ConfigError("output.dir: expected a string")

    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not (0 <= seed < 2**64):
        raise ConfigError(f"seed: expected an integer in [0, 2^64), got {seed!r}")

    return ExperimentConfig(
        params, grid, solver, initial, sweep, family, eps_values, mixtures, Path(out_dir), seed
    )


def _check_gaussian(path: str, a: float, params: Parameters) -> None:
    try:
        GaussianSpec(a, 1.0, params.n, params.p)
    except ParameterError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def load_config(path: Optional[str]) -> ExperimentConfig:
    if path is None:
        return parse_config({})
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    return parse_config(doc)
