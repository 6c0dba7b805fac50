"""``threshold-lab`` command line.

Every command resolves its flags into a :class:`RunConfig`, validates it
(one diagnostic line per bad field), runs, and writes its result atomically.
Outputs start with the resolved configuration, seed included, so any file
can be regenerated from its own header.  Wall-clock runtime is kept out of
the result file (it would break byte-identical reruns) and goes to a
``<out>.run.json`` sidecar, or to stderr when writing to stdout.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import secrets
import subprocess
import sys
import tempfile
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .constraints import (
    corollary_case,
    format_constraint_set,
    load_constraint_set,
    schaefer_class_clausal,
    threshold_class,
)
from .experiments import (
    Case,
    Decider,
    Model,
    case_theorem_check,
    endpoint_predictor_study,
    sat_curve,
    sharpness_trend,
    threshold_points,
)
from .formula import read_dimacs, sample_const_prob, sample_multiset, to_dimacs
from .queueing import parse_rate, qempty_fixed_rate, qempty_mc
from .seeding import default_jobs, rng_for
from .solver import ORACLE_MAX_VARS, cdcl_sat, oracle_sat, pur

COMMANDS = ("classify", "generate", "solve", "pur-trace", "curve", "width", "trend", "case-check",
            "predictor-study", "qempty")

REQUIRED = {
    "classify": ("constraints",),
    "generate": ("constraints", "n"),
    "solve": ("input",),
    "pur-trace": (),
    "curve": ("constraints", "n", "controls"),
    "width": ("constraints", "n", "epsilon"),
    "trend": ("constraints", "nlist", "epsilon"),
    "case-check": ("case", "constraints", "c", "n"),
    "predictor-study": ("constraints", "n", "controls"),
    "qempty": ("rate",),
}


@dataclass
class RunConfig:
    command: str
    constraints: str | None = None
    input: str | None = None
    n: int | None = None
    m: int | None = None
    p: float | None = None
    c: float | None = None
    epsilon: float | None = None
    trials: int = 1000
    jobs: int = 1
    horizon: int = 10_000
    q0: int = 1
    seed: int | None = None
    out: str | None = None
    format: str = "csv"
    rate: str | None = None
    model: str = "const"
    decider: str = "oracle"
    method: str = "coupled"
    case: str | None = None
    controls: list[float] = field(default_factory=list)
    nlist: list[int] = field(default_factory=list)
    bracket: list[float] = field(default_factory=lambda: [0.0, 1.0])
    replicates: int = 10
    allow_pur_accepts: bool = False


def version_string() -> str:
    """Package version, with the source commit appended when run from a git checkout."""
    try:
        rev = subprocess.run(["git", "rev-parse", "--short", "HEAD"], cwd=Path(__file__).parent,
                             capture_output=True, text=True, timeout=5)
        if rev.returncode == 0 and rev.stdout.strip():
            return f"{__version__}+g{rev.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


# -- parsing and validation ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # values stay strings here so validation can report every bad field at once
    for flag in ("constraints", "input", "n", "m", "p", "c", "epsilon", "trials", "jobs", "horizon", "q0",
                 "seed", "out", "format", "rate", "model", "decider", "method", "case", "controls", "nlist",
                 "bracket", "replicates"):
        common.add_argument(f"--{flag}")
    common.add_argument("--allow-pur-accepts", action="store_true",
                        help="let the pur decider measure Pr[PUR accepts] on non-Horn sets")
    parser = argparse.ArgumentParser(prog="threshold-lab",
                                     description="Threshold experiments for random clausal SAT(S).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "classify": "threshold and complexity class of a constraint set",
        "generate": "sample a random formula as DIMACS",
        "solve": "decide a DIMACS formula",
        "pur-trace": "per-stage clause counts of one PUR run",
        "curve": "Pr[sat] over a grid of controls",
        "width": "threshold points and width ratio at one n",
        "trend": "width ratio trend over several n",
        "case-check": "PUR acceptance vs its limit formula",
        "predictor-study": "accuracy of the endpoint predictor",
        "qempty": "emptying probability of the Poisson-arrival queue",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _to_seed(s):
    v = int(s, 0)
    if not 0 <= v < 2**64:
        raise ValueError("must be a 64-bit unsigned integer")
    return v


def _float_list(s):
    return [float(x) for x in s.split(",") if x.strip()]


def _int_list(s):
    return [int(x) for x in s.split(",") if x.strip()]


CONVERTERS = {
    "n": int, "m": int, "trials": int, "jobs": int, "horizon": int, "q0": int, "replicates": int,
    "p": float, "c": float, "epsilon": float, "seed": _to_seed,
    "controls": _float_list, "nlist": _int_list, "bracket": _float_list,
}


def resolve_config(ns: argparse.Namespace) -> tuple[RunConfig, list[str]]:
    """Turn parsed strings into a RunConfig; returns it with a list of field diagnostics."""
    errors: list[str] = []
    values = {"command": ns.command, "allow_pur_accepts": ns.allow_pur_accepts}
    for f in dataclasses.fields(RunConfig):
        raw = getattr(ns, f.name, None)
        if f.name in values or raw is None:
            continue
        conv = CONVERTERS.get(f.name)
        try:
            values[f.name] = conv(raw) if conv else raw
        except ValueError as e:
            errors.append(f"--{f.name}: cannot parse {raw!r} ({e})")
    if "jobs" not in values and ns.jobs is None:
        try:
            values["jobs"] = default_jobs()
        except ValueError as e:
            errors.append(f"--jobs: {e}")
    if ns.format is None and ns.out and ns.out.endswith(".json"):
        values["format"] = "json"
    cfg = RunConfig(**values)
    errors += validate(cfg)
    if cfg.seed is None:
        cfg.seed = secrets.randbits(64)
    return cfg, errors


def validate(cfg: RunConfig) -> list[str]:
    errs = []
    for name in REQUIRED[cfg.command]:
        if getattr(cfg, name) in (None, []):
            errs.append(f"--{name}: required by '{cfg.command}'")
    if cfg.command == "pur-trace" and not (cfg.input or (cfg.constraints and cfg.n is not None)):
        errs.append("--input: 'pur-trace' needs --input, or --constraints with --n and --m/--p")
    if cfg.command in ("generate", "pur-trace") and not cfg.input:
        if (cfg.m is None) == (cfg.p is None):
            errs.append(f"--m/--p: '{cfg.command}' needs exactly one of --m (multiset) or --p (constant probability)")
    for name in ("n", "trials", "jobs", "horizon", "replicates"):
        v = getattr(cfg, name)
        if v is not None and v < 1:
            errs.append(f"--{name}: must be at least 1, got {v}")
    for name in ("m", "q0"):
        v = getattr(cfg, name)
        if v is not None and v < 0:
            errs.append(f"--{name}: must be nonnegative, got {v}")
    if cfg.p is not None and not 0 <= cfg.p <= 1:
        errs.append(f"--p: must lie in [0, 1], got {cfg.p}")
    if cfg.c is not None and cfg.c <= 0:
        errs.append(f"--c: must be positive, got {cfg.c}")
    if cfg.epsilon is not None and not 0 < cfg.epsilon < 0.5:
        errs.append(f"--epsilon: must lie in (0, 1/2), got {cfg.epsilon}")
    if cfg.format not in ("csv", "json"):
        errs.append(f"--format: expected csv or json, got {cfg.format!r}")
    choices = {"model": [m.value for m in Model], "decider": [d.value for d in Decider],
               "method": ["coupled", "bisect"], "case": [c.value for c in Case]}
    for name, allowed in choices.items():
        v = getattr(cfg, name)
        if v is not None and v not in allowed:
            errs.append(f"--{name}: expected one of {', '.join(allowed)}, got {v!r}")
    if any(not math.isfinite(x) or x < 0 for x in cfg.controls):
        errs.append("--controls: values must be finite and nonnegative")
    if cfg.model == "const" and any(x > 1 for x in cfg.controls):
        errs.append("--controls: probabilities must not exceed 1 under the const model")
    if cfg.nlist and (len(cfg.nlist) < 3 or any(b <= a for a, b in zip(cfg.nlist, cfg.nlist[1:]))):
        errs.append(f"--nlist: need at least three increasing sizes, got {cfg.nlist}")
    if len(cfg.bracket) != 2 or not 0 <= cfg.bracket[0] < cfg.bracket[1]:
        errs.append(f"--bracket: need LO,HI with 0 <= LO < HI, got {cfg.bracket}")
    for name in ("constraints", "input"):
        v = getattr(cfg, name)
        if v and not Path(v).is_file():
            errs.append(f"--{name}: no such file {v!r}")
    if cfg.rate:
        try:
            parse_rate(cfg.rate)
        except (ValueError, OSError) as e:
            errs.append(f"--rate: {e}")
    if (cfg.decider == "oracle" and cfg.command in ("curve", "width", "solve") and cfg.n is not None
            and cfg.n > ORACLE_MAX_VARS):
        errs.append(f"--decider: the oracle handles n <= {ORACLE_MAX_VARS}; use cdcl or pur for n = {cfg.n}")
    return errs


# -- output --------------------------------------------------------------------------------

def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enums
        return obj.value
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def config_record(cfg: RunConfig) -> dict:
    return {"tool": "threshold-lab", "version": version_string(), "config": _jsonable(cfg)}


def render(cfg: RunConfig, rows: list[dict], extra: dict | None = None) -> str:
    """Rows as CSV with a commented config header, or as one JSON record."""
    if cfg.format == "json":
        rec = config_record(cfg)
        if extra:
            rec.update(_jsonable(extra))
        rec["results"] = _jsonable(rows)
        return json.dumps(rec, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(config_record(cfg), sort_keys=False) + "\n")
    for k, v in (extra or {}).items():
        buf.write(f"# {k}: {json.dumps(_jsonable(v))}\n")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def write_atomic(path: str | Path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(cfg: RunConfig, text: str, runtime: float):
    if cfg.out:
        write_atomic(cfg.out, text)
        write_atomic(cfg.out + ".run.json",
                     json.dumps({"runtime_seconds": round(runtime, 3), "seed": cfg.seed}) + "\n")
    else:
        sys.stdout.write(text)
        print(f"runtime: {runtime:.3f} s", file=sys.stderr)


# -- commands ----------------------------------------------------------------------------------

def _sample(cfg: RunConfig, S):
    rng = rng_for(cfg.seed, 0)
    if cfg.m is not None:
        return sample_multiset(S, cfg.n, cfg.m, rng)
    return sample_const_prob(S, cfg.n, cfg.p, rng)


def cmd_classify(cfg):
    S = load_constraint_set(cfg.constraints)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        tc = threshold_class(S)
    rows = [{"quantity": q, "value": v} for q, v in S.stats.as_rows()]
    extra = {"constraints": str(S), "threshold_class": tc.value,
             "schaefer_class": schaefer_class_clausal(S).value}
    if tc.value == "Coarse":
        extra["corollary_cases"] = sorted(c.value for c in corollary_case(S))
    if caught:
        extra["warnings"] = [str(w.message) for w in caught]
    if not cfg.out:
        # human-readable summary on stdout
        lines = [tc.value, f"schaefer: {extra['schaefer_class']}"]
        lines += [f"{q}\t{v}" for q, v in S.stats.as_rows()]
        lines += [f"warning: {w}" for w in extra.get("warnings", [])]
        return "\n".join(lines) + "\n"
    return render(cfg, rows, extra)


def cmd_generate(cfg):
    S = load_constraint_set(cfg.constraints)
    F = _sample(cfg, S)
    header = [f"{k}={v}" for k, v in config_record(cfg)["config"].items() if v not in (None, [], False)]
    return to_dimacs(F, [f"threshold-lab {version_string()}"] + header)


def _decide_text(cfg, F):
    rows = []
    if cfg.decider == "pur":
        res = pur(F, rng=rng_for(cfg.seed, 0))
        rows.append({"decider": "pur", "result": res.outcome.value, "assigned": res.assigned})
    elif cfg.decider == "oracle":
        rows.append({"decider": "oracle", "result": "SAT" if oracle_sat(F) else "UNSAT"})
    else:
        rows.append({"decider": "cdcl", "result": "SAT" if cdcl_sat(F) else "UNSAT"})
    return rows


def cmd_solve(cfg):
    F = read_dimacs(cfg.input)
    if cfg.decider == "oracle" and F.n > ORACLE_MAX_VARS:
        raise ValueError(f"the oracle handles n <= {ORACLE_MAX_VARS}; this formula has n = {F.n}")
    return render(cfg, _decide_text(cfg, F), {"n": F.n, "m": F.m})


def cmd_pur_trace(cfg):
    if cfg.input:
        F = read_dimacs(cfg.input)
    else:
        F = _sample(cfg, load_constraint_set(cfg.constraints))
    res = pur(F, trace=True, rng=rng_for(cfg.seed, 1))
    rows = [{"t": s.t, "i": i, "P_i": s.P[i], "N_i": s.N[i]} for s in res.trace.stages for i in range(1, len(s.P))]
    return render(cfg, rows, {"outcome": res.outcome.value, "halt_stage": res.trace.halt_stage})


def cmd_curve(cfg):
    S = load_constraint_set(cfg.constraints)
    pts = sat_curve(S, cfg.n, cfg.controls, cfg.trials, cfg.decider, cfg.model, cfg.seed, cfg.jobs,
                    cfg.allow_pur_accepts)
    rows = [{"control": p.control, "model": p.model, "metric": p.metric, "estimate": p.estimate,
             "ci_low": p.ci95[0], "ci_high": p.ci95[1], "trials": p.trials} for p in pts]
    return render(cfg, rows)


def _width_row(r):
    return {"n": r.n, "epsilon": r.epsilon, "p_eps": r.p_eps, "p_half": r.p_half,
            "p_one_minus_eps": r.p_one_minus_eps, "width_ratio": r.width_ratio,
            "ratio_ci_low": r.ratio_ci[0], "ratio_ci_high": r.ratio_ci[1], "method": r.method, "trials": r.trials}


def cmd_width(cfg):
    S = load_constraint_set(cfg.constraints)
    r = threshold_points(S, cfg.n, cfg.epsilon, cfg.decider, cfg.trials, cfg.seed, cfg.model, cfg.method,
                         tuple(cfg.bracket), cfg.jobs)
    return render(cfg, [_width_row(r)])


def cmd_trend(cfg):
    S = load_constraint_set(cfg.constraints)
    kw = {"bracket": tuple(cfg.bracket)} if cfg.method == "bisect" else {}
    tr = sharpness_trend(S, cfg.nlist, cfg.epsilon, cfg.decider, cfg.trials, cfg.seed, cfg.model, cfg.method,
                         cfg.jobs, **kw)
    return render(cfg, [_width_row(r) for r in tr.reports], {"verdict": tr.verdict.value})


def cmd_case_check(cfg):
    S = load_constraint_set(cfg.constraints)
    r = case_theorem_check(cfg.case, S, cfg.c, cfg.n, cfg.trials, cfg.seed, cfg.jobs, cfg.horizon, cfg.replicates)
    row = _jsonable(r)
    row["ci_low"], row["ci_high"] = row.pop("ci95")
    return render(cfg, [row])


def cmd_predictor_study(cfg):
    S = load_constraint_set(cfg.constraints)
    decider = None if cfg.n <= ORACLE_MAX_VARS and cfg.decider == "oracle" else (
        cfg.decider if cfg.decider != "oracle" else None)
    pts = endpoint_predictor_study(S, cfg.n, cfg.controls, cfg.trials, cfg.seed, cfg.model, decider, cfg.jobs)
    rows = []
    for p in pts:
        rows.append({"control": p.control, "success_rate": p.success_rate,
                     "success_ci_low": p.success_ci[0] if p.success_ci else None,
                     "success_ci_high": p.success_ci[1] if p.success_ci else None,
                     "lower_bound": p.lower_bound, "lower_bound_ci_low": p.lower_bound_ci[0],
                     "lower_bound_ci_high": p.lower_bound_ci[1], "trials": p.trials})
    return render(cfg, rows)


def cmd_qempty(cfg):
    rate = parse_rate(cfg.rate)
    est = qempty_mc(rate, cfg.trials, cfg.horizon, cfg.q0, cfg.seed, cfg.jobs)
    row = {"rate": rate.label, "estimate": est.estimate, "ci_low": est.ci95[0], "ci_high": est.ci95[1],
           "trials": est.trials, "horizon": est.horizon, "initial_queue": est.initial_queue,
           "emptied": est.emptied,
           "fixed_point": qempty_fixed_rate(rate.constant) if rate.constant is not None and cfg.q0 == 1 else None}
    return render(cfg, [row])


HANDLERS = {
    "classify": cmd_classify, "generate": cmd_generate, "solve": cmd_solve, "pur-trace": cmd_pur_trace,
    "curve": cmd_curve, "width": cmd_width, "trend": cmd_trend, "case-check": cmd_case_check,
    "predictor-study": cmd_predictor_study, "qempty": cmd_qempty,
}


def run(cfg: RunConfig) -> int:
    start = time.perf_counter()
    try:
        text = HANDLERS[cfg.command](cfg)
        emit(cfg, text, time.perf_counter() - start)
    except (OSError, ValueError) as e:
        print(f"threshold-lab {cfg.command}: error: {e}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    cfg, errors = resolve_config(ns)
    if errors:
        for e in errors:
            print(f"threshold-lab {cfg.command}: {e}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
