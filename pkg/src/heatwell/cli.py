"""Command line entry point: ``heatwell {check,functionals,evolve,sweep,welldepth}``.

Exit codes: 0 completed (an Inconclusive verdict is a result), 1 bad
arguments or configuration, 2 an internal check failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import checks, diagnostics
from .config import ConfigError, ExperimentConfig, load_config
from .functionals import (
    classify,
    depth_eps_rows,
    nehari_scaling,
    report,
    well_depth_upper,
)
from .solver import evolve
from .trace import SimulationTrace
from .weighted_space import Field

EXIT_OK, EXIT_CONFIG, EXIT_CHECK = 0, 1, 2

TRACE_COLUMNS = [
    "s", "t", "dt", "E", "I", "l2k_sq", "h1k_sq", "sup_norm",
    "M", "M_prime", "M_double_prime", "dissipation_accum", "energy_residual",
]
SWEEP_COLUMNS = [
    "a", "b", "E0", "I0", "classification", "verdict", "T_s_mid", "max_h1k", "status",
]


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _json_default(obj):
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _clean(x):
    # JSON has no inf/nan
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def write_json(path: Path, doc: dict) -> str:
    text = json.dumps(_clean(doc), indent=2, sort_keys=True, default=_json_default) + "\n"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return text


def _initial_field(cfg: ExperimentConfig, a: Optional[float] = None, b: Optional[float] = None) -> Field:
    a = cfg.initial.a if a is None else a
    b = cfg.initial.b if b is None else b
    return Field.gaussian(cfg.grid, a, b)


def _d_est(cfg: ExperimentConfig) -> float:
    return well_depth_upper(cfg.family, cfg.params, cfg.grid).d_upper


def write_trace_csv(path: Path, trace: SimulationTrace) -> None:
    residuals = diagnostics.energy_ledger(trace)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(TRACE_COLUMNS)
        for row, res in zip(trace.rows, residuals):
            wr.writerow(
                fmt(v)
                for v in (
                    row.s, row.t, row.dt, row.energy, row.nehari, row.l2k_sq, row.h1k_sq,
                    row.sup_norm, row.m, row.m_prime, row.m_double_prime,
                    row.dissipation_accum, res,
                )
            )


def outcome_doc(trace: SimulationTrace, cfg: ExperimentConfig) -> dict:
    out = trace.outcome
    inv = diagnostics.invariance_monitor(trace)
    resolved = diagnostics.resolved_mask(trace, cfg.grid.h)
    inv_resolved = diagnostics.invariance_monitor(trace, resolved)
    residuals = diagnostics.energy_ledger(trace)
    return {
        "verdict": out.verdict.value,
        "reason": out.reason,
        "classification": out.classification.value,
        "classification_rigorous": out.classification.rigorous,
        "T_s": out.T_s,
        "T_s_interval": list(out.T_s_interval) if out.T_s_interval else None,
        "T": out.T,
        "max_h1k_sq": out.max_h1k_sq,
        "max_sup_norm": out.max_sup_norm,
        "s_final": out.s_final,
        "steps": out.steps,
        "rejected_steps": out.rejected_steps,
        "d_est": out.d_est,
        "nehari_first_sign_flip_s": inv.first_flip_s,
        "max_energy_residual": float(residuals.max()),
        "energy_increase": diagnostics.energy_monotone_violation(trace),
        "energy_increase_resolved": diagnostics.energy_monotone_violation(trace, resolved),
        "nehari_first_sign_flip_s_resolved": inv_resolved.first_flip_s,
        "resolved_rows": int(resolved.sum()),
        "initial": {"family": cfg.initial.family, "a": cfg.initial.a, "b": cfg.initial.b},
        "params": {"n": cfg.params.n, "p": cfg.params.p},
    }


def cmd_check(cfg: ExperimentConfig, out_dir: Path) -> int:
    results = checks.run_all(cfg.params, seed=cfg.seed, mixtures=cfg.mixtures)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  measured={r.measured:.6g}  tol={r.tolerance:g}")
    ok = all(r.passed for r in results)
    write_json(out_dir / "check.json", {"passed": ok, "checks": [r.as_dict() for r in results]})
    return EXIT_OK if ok else EXIT_CHECK


def cmd_functionals(cfg: ExperimentConfig, out_dir: Path) -> int:
    w = _initial_field(cfg)
    rep = report(w, cfg.params)
    d_est = _d_est(cfg)
    doc = {
        "report": {
            "l2k_sq": rep.l2k_sq,
            "grad_sq": rep.grad_sq,
            "lp1": rep.lp1,
            "energy": rep.energy,
            "nehari": rep.nehari,
            "sup_norm": rep.sup_norm,
        },
        "classification": classify(w, cfg.params, d_est).value,
        "d_est": d_est,
        "nehari_scaling": None,
    }
    if not w.is_zero():
        sc = nehari_scaling(w, cfg.params)
        doc["nehari_scaling"] = {"q_coeff": sc.q_coeff, "a_coeff": sc.a_coeff, "b_star": sc.b_star}
    print(write_json(out_dir / "functionals.json", doc), end="")
    return EXIT_OK


def cmd_evolve(cfg: ExperimentConfig, out_dir: Path) -> int:
    trace, _ = evolve(_initial_field(cfg), cfg.params, cfg.solver, d_est=_d_est(cfg))
    write_trace_csv(out_dir / "trace.csv", trace)
    print(write_json(out_dir / "outcome.json", outcome_doc(trace, cfg)), end="")
    return EXIT_OK


def _sweep_row(cfg: ExperimentConfig, d_est: float, a: float, b: float) -> list[str]:
    try:
        u0 = _initial_field(cfg, a, b)
        _, out = evolve(u0, cfg.params, cfg.solver, d_est=d_est)
        rep = report(u0, cfg.params)
        vals = [a, b, rep.energy, rep.nehari, out.classification.value, out.verdict.value, out.T_s, out.max_h1k_sq, "ok"]
    except Exception as exc:  # recorded per run; the sweep carries on
        vals = [a, b, None, None, "", "", None, None, f"error: {exc}"]
    return [fmt(v) for v in vals]


def cmd_sweep(cfg: ExperimentConfig, out_dir: Path, threads: int = 1) -> int:
    pairs = sorted((a, b) for a in cfg.sweep.a_values for b in cfg.sweep.b_values)
    d_est = _d_est(cfg)
    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda ab: _sweep_row(cfg, d_est, *ab), pairs))
    else:
        rows = [_sweep_row(cfg, d_est, a, b) for a, b in pairs]
    rows.sort(key=lambda r: (float(r[0]), float(r[1])))
    path = out_dir / "sweep.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(SWEEP_COLUMNS)
        wr.writerows(rows)
    for r in rows:
        print(",".join(r))
    return EXIT_OK


def cmd_welldepth(cfg: ExperimentConfig, out_dir: Path) -> int:
    est, rows = depth_eps_rows(cfg.family, cfg.params, cfg.eps_values, cfg.grid)
    doc = {
        "d_upper": est.d_upper,
        "minimizing_a": est.minimizing_a,
        "family_size": est.family_size,
        "family": {"a_min": cfg.family.a_min, "a_max": cfg.family.a_max, "a_count": cfg.family.a_count},
        "d_eps": rows,
        "lemma33_check": all(r["pass"] for r in rows),
    }
    print(write_json(out_dir / "welldepth.json", doc), end="")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config (defaults apply when omitted)")
    common.add_argument("--output", help="output directory (overrides output.dir)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    common.add_argument("--seed", type=int, help="random seed (overrides config seed)")

    parser = _Parser(prog="heatwell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (
        ("check", "run the numerical invariant suite"),
        ("functionals", "energy, Nehari functional and classification of the initial datum"),
        ("evolve", "integrate the rescaled flow and write trace.csv and outcome.json"),
        ("sweep", "run the (a, b) grid and write sweep.csv"),
        ("welldepth", "well-depth upper bound and the d_eps table"),
    ):
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError(f"--seed: expected an integer in [0, 2^64), got {args.seed}")
            cfg = _replace(cfg, seed=args.seed)
        if args.threads < 1:
            raise ConfigError(f"--threads: must be >= 1 (got {args.threads})")
    except ConfigError as exc:
        print(f"heatwell: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.output) if args.output else cfg.output_dir

    if args.command == "check":
        return cmd_check(cfg, out_dir)
    if args.command == "functionals":
        return cmd_functionals(cfg, out_dir)
    if args.command == "evolve":
        return cmd_evolve(cfg, out_dir)
    if args.command == "sweep":
        return cmd_sweep(cfg, out_dir, args.threads)
    return cmd_welldepth(cfg, out_dir)


def _replace(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    from dataclasses import replace

    return replace(cfg, **kw)


if __name__ == "__main__":
    sys.exit(main())
