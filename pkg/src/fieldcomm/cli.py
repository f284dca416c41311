"""Configuration-driven batch runner with deterministic CSV output.

Usage:
    fieldcomm <experiment> --config cfg.json [--out results.csv] [--seed N] [--jobs N]

Experiments: coherent-info-sweep, state-transfer, cavity, delocalize,
erasure, audit. Lengths in the config are in units of the detector width
(or the cavity length for the cavity run); couplings are the
dimensionless ratios. Each run writes one CSV with a fixed per-experiment
header plus a JSON manifest (config echo, versions, wall time); both are
replaced atomically and deleted on failure. Exit codes: 0 success, 2
validation error, 3 numerical-tolerance failure.
"""
from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy

from . import __version__
from .algebra import AXIS_STATES, haar_states
from .errors import (
    AuditError,
    BoundViolationError,
    CavityTruncationError,
    FieldcommError,
    PSDViolationError,
    QuadratureError,
    UnitarityError,
)
from .profiles import ProfileFunction
from .protocols import (
    AuditClaims,
    alice_to_field,
    appendix_c_audit,
    cavity_transfer,
    delocalize,
    erasure_coherent_info,
    state_transfer,
    transfer_params_for_gamma,
)

EXPERIMENTS = (
    "coherent-info-sweep",
    "state-transfer",
    "cavity",
    "delocalize",
    "erasure",
    "audit",
)

_NUMERICAL_ERRORS = (
    QuadratureError,
    BoundViolationError,
    PSDViolationError,
    UnitarityError,
    CavityTruncationError,
    AuditError,
)


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.11e}"  # 12 significant digits, bit-exact diffing


def _grid(spec) -> list[float]:
    if isinstance(spec, (int, float)):
        return [float(spec)]
    if isinstance(spec, list):
        values = [float(v) for v in spec]
    else:
        start, stop, step = float(spec["start"]), float(spec["stop"]), float(spec["step"])
        if step <= 0:
            raise ValueError("grid step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(n)]
    if not values:
        raise ValueError("grid is empty")
    return values


def _profile_from(cfg) -> ProfileFunction:
    kind = cfg.get("kind", "triangle")
    if kind == "triangle":
        return ProfileFunction.triangle(cfg.get("width", 1.0), cfg.get("center", 0.0))
    if kind == "skew_triangle":
        return ProfileFunction.skew_triangle(cfg.get("width", 1.0), cfg.get("center", 0.0))
    if kind == "nodes":
        return ProfileFunction(tuple((float(x), float(v)) for x, v in cfg["nodes"]))
    raise ValueError(f"unknown profile kind {kind!r}")


def _inputs_from(cfg, seed: int):
    inputs = []
    if cfg.get("axis_inputs", True):
        inputs.extend(AXIS_STATES)
    n_haar = int(cfg.get("haar_inputs", 100))
    inputs.extend(
        (f"haar{i}", v) for i, v in enumerate(haar_states(n_haar, seed))
    )
    return inputs


def _map_jobs(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# --- experiment drivers: each returns (header, rows) ------------------------


def _run_coherent_info_sweep(cfg, seed, jobs):
    mus = _grid(cfg.get("mu_over_ell", {"start": 0.0, "stop": 3.0, "step": 0.1}))
    delays = _grid(cfg.get("delay_over_ell", 1.5))
    profile = _profile_from(cfg.get("profile", {}))
    points = [(m, d) for m in mus for d in delays]

    def one(point):
        m, d = point
        return (m, d, alice_to_field(m, d * profile.width, profile))

    rows = _map_jobs(one, points, jobs)
    return "mu_over_ell,delay_over_ell,coherent_info_bits", rows


def _run_state_transfer(cfg, seed, jobs):
    gammas = _grid(cfg.get("gamma1_norm_sq", [0.02]))
    inputs = _inputs_from(cfg, seed)
    kwargs = {
        "width": cfg.get("width", 1.0),
        "delay": cfg.get("delay", 1.5),
        "separation": cfg.get("separation", 5.0),
    }

    def one(g):
        params = transfer_params_for_gamma(g, **kwargs)
        report = state_transfer(params, inputs)
        return [
            (params.mu_a, report.gamma1_norm_sq, label, f, report.bound_value)
            for label, f in report.fidelity_per_input
        ]

    rows = [r for chunk in _map_jobs(one, gammas, jobs) for r in chunk]
    return "mu_A,gamma1_norm_sq,input_label,fidelity,bound", rows


def _run_cavity(cfg, seed, jobs):
    lams = _grid(cfg.get("lambda1", [3.0, 5.0, 10.0]))
    length = cfg.get("cavity_length", 1.0)
    profile = _profile_from(cfg.get("profile", {"kind": "triangle", "width": length / 8}))
    x_sender = cfg.get("x_sender", 0.4 * length)
    cutoff = int(cfg.get("mode_cutoff", 2048))

    def one(lam):
        report = cavity_transfer(
            lam, profile, length, x_sender=x_sender, mode_cutoff=cutoff
        )
        return [
            (lam, report.gamma_norm_sq, f, report.bound_value)
            for _, f in report.fidelity_per_input
        ]

    rows = [r for chunk in _map_jobs(one, lams, jobs) for r in chunk]
    return "lambda1,gamma_norm_sq,fidelity,bound", rows


def _run_delocalize(cfg, seed, jobs):
    gammas = _grid(cfg.get("gamma2_norm_sq", [0.02]))
    inputs = _inputs_from(cfg, seed)

    def one(g):
        report = delocalize(
            gamma2_norm_sq=g,
            separation=cfg.get("separation", 5.0),
            delay=cfg.get("delay", 1.5),
            inputs=inputs,
        )
        return [
            (
                report.gamma2_norm_sq,
                r.label,
                r.ghz_fidelity,
                report.fidelity_bound,
                max(r.coherence_left, r.coherence_right),
                report.coherence_bound,
            )
            for r in report.records
        ]

    rows = [r for chunk in _map_jobs(one, gammas, jobs) for r in chunk]
    return (
        "gamma2_norm_sq,input_label,ghz_fidelity,fidelity_bound,coherence,coherence_bound",
        rows,
    )


def _run_erasure(cfg, seed, jobs):
    ns = [int(n) for n in _grid(cfg.get("receivers", [1, 2, 3]))]
    rows = _map_jobs(lambda n: (n, erasure_coherent_info(n)), ns, jobs)
    return "N,coherent_info_bits", rows


def _run_audit(cfg, seed, jobs):
    rows = []
    for g in _grid(cfg.get("gamma1_norm_sq", [0.02])):
        params = transfer_params_for_gamma(
            g,
            width=cfg.get("width", 1.0),
            delay=cfg.get("delay", 1.5),
            separation=cfg.get("separation", 5.0),
        )
        report = appendix_c_audit(params)
        rows.extend((c.name, c.passed, c.margin) for c in report.checks)
    if "forged" in cfg:
        forged = appendix_c_audit(claims=AuditClaims(**cfg["forged"]))
        rows.extend((f"forged-{c.name}", c.passed, c.margin) for c in forged.checks)
        forged.raise_on_failure()
    return "check,passed,margin", rows


_DRIVERS = {
    "coherent-info-sweep": _run_coherent_info_sweep,
    "state-transfer": _run_state_transfer,
    "cavity": _run_cavity,
    "delocalize": _run_delocalize,
    "erasure": _run_erasure,
    "audit": _run_audit,
}


def _atomic_write(path: str, content: str) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".fieldcomm-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(experiment: str, config: dict, out_path: str, seed: int, jobs: int) -> int:
    """Execute one experiment; returns the process exit code."""
    t_start = time.time()
    try:
        if experiment not in _DRIVERS:
            raise ValueError(f"unknown experiment {experiment!r}")
        header, rows = _DRIVERS[experiment](config, seed, jobs)
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (FieldcommError, ValueError, KeyError, TypeError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2

    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    _atomic_write(out_path, "\n".join(lines) + "\n")
    manifest = {
        "experiment": experiment,
        "config": config,
        "seed": seed,
        "jobs": jobs,
        "rows": len(rows),
        "output": os.path.basename(out_path),
        "versions": {
            "fieldcomm": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "wall_time_s": round(time.time() - t_start, 3),
    }
    _atomic_write(out_path + ".manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fieldcomm", description="field-communication protocol experiments"
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True, help="JSON configuration file")
    parser.add_argument("--out", default=None, help="output CSV path")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument(
        "--jobs", type=int, default=None,
        help="concurrent grid evaluations (fallback: FIELDCOMM_JOBS)",
    )
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    jobs = args.jobs
    if jobs is None:
        jobs = int(os.environ.get("FIELDCOMM_JOBS", config.get("jobs", 1)))
    out = args.out or config.get("output", f"{args.experiment}.csv")
    return run(args.experiment, config, out, seed, jobs)


if __name__ == "__main__":
    raise SystemExit(main())
