"""Config-driven experiment runner.

Usage: ``heatfield <subcommand> --config <file> [--out <path>]``.

Config files are line oriented: blank lines and ``#`` comments are
ignored, every other line is ``key = value`` with dotted lowercase
keys.  Values are decimal numbers except for the output path ``out``
and enumerated choices such as ``u.kind``.  Each subcommand validates
its keys against the target operation's preconditions before running
anything, writes one CSV (17 significant digits, Unix newlines, fixed
column order) and a JSON manifest next to it.  Runs are bit
reproducible: identical configs give byte-identical CSVs.

Exit status: 0 on success, 1 on config parse/validation errors, 2 when
the computation itself fails (the manifest then records the error).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import re
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__, dyson, kernels, montecarlo, pring

__all__ = ["ParseError", "ValidationError", "ExperimentConfig", "parse_config", "run_experiment", "main"]


class ParseError(Exception):
    """Config file unreadable or malformed; message carries path and line."""


class ValidationError(Exception):
    """A config value violates the target operation's preconditions."""


_KEY_RE = re.compile(r"^[a-z][a-z0-9]*(\.[a-z][a-z0-9]*)*$")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    params: dict
    out: str | None = None


def _positive(x):
    return x > 0


def _non_negative(x):
    return x >= 0


def _unit_interval(x):
    return 0.0 <= x <= 1.0


# key -> (python type, default or REQUIRED, predicate, constraint text)
_REQUIRED = object()

_SCHEMAS = {
    "kernel": {
        "gamma": (float, 0.0, _non_negative, "gamma >= 0"),
        "d": (int, 1, lambda v: 1 <= v <= 3, "d in {1, 2, 3}"),
        "t.min": (float, _REQUIRED, _positive, "t.min > 0"),
        "t.max": (float, _REQUIRED, _positive, "t.max > 0"),
        "t.count": (int, _REQUIRED, lambda v: v >= 1, "t.count >= 1"),
        "r.min": (float, 0.0, _non_negative, "r.min >= 0"),
        "r.max": (float, _REQUIRED, _non_negative, "r.max >= 0"),
        "r.count": (int, _REQUIRED, lambda v: v >= 1, "r.count >= 1"),
    },
    "semigroup": {
        "t": (float, _REQUIRED, _positive, "t > 0"),
        "grid.origin": (float, _REQUIRED, math.isfinite, "grid.origin finite"),
        "grid.step": (float, _REQUIRED, _positive, "grid.step > 0"),
        "grid.count": (int, _REQUIRED, lambda v: v >= 2, "grid.count >= 2"),
        "u.kind": (str, "gaussian", lambda v: v in ("gaussian", "indicator"), "u.kind in {gaussian, indicator}"),
        "u.center": (float, 0.0, math.isfinite, "u.center finite"),
        "u.sigma": (float, 0.5, _positive, "u.sigma > 0"),
        "u.lo": (float, -1.0, math.isfinite, "u.lo finite"),
        "u.hi": (float, 1.0, math.isfinite, "u.hi finite"),
    },
    "clock": {
        "gamma": (float, _REQUIRED, _positive, "gamma > 0"),
        "dtau.max": (float, _REQUIRED, _positive, "dtau.max > 0"),
        "dtau.count": (int, 51, lambda v: v >= 2, "dtau.count >= 2"),
        "replicas": (int, 10_000, lambda v: v >= 2, "replicas >= 2"),
        "seed": (int, 0, _non_negative, "seed >= 0"),
    },
    "extinction": {
        "alpha": (float, _REQUIRED, _unit_interval, "alpha in [0, 1]"),
        "gamma": (float, _REQUIRED, _positive, "gamma > 0"),
        "horizon": (float, 60.0, _non_negative, "horizon >= 0"),
        "replicas": (int, _REQUIRED, lambda v: v >= 1, "replicas >= 1"),
        "seed": (int, 0, _non_negative, "seed >= 0"),
        "max.particles": (int, 1_000_000, lambda v: v >= 1, "max.particles >= 1"),
        "tau.count": (int, 121, lambda v: v >= 2, "tau.count >= 2"),
    },
    "onepoint": {
        "alpha": (float, _REQUIRED, _unit_interval, "alpha in [0, 1]"),
        "gamma": (float, _REQUIRED, _positive, "gamma > 0"),
        "tau.max": (float, _REQUIRED, _positive, "tau.max > 0"),
        "tau.step": (float, None, _positive, "tau.step > 0"),
        "picard.order": (int, 20, lambda v: v >= 1, "picard.order >= 1"),
    },
    "gf": {
        "alpha": (float, _REQUIRED, _unit_interval, "alpha in [0, 1]"),
        "gamma": (float, _REQUIRED, _positive, "gamma > 0"),
        "theta": (float, _REQUIRED, _unit_interval, "theta in [0, 1]"),
        "t.max": (float, _REQUIRED, _positive, "t.max > 0"),
        "t.count": (int, 11, lambda v: v >= 2, "t.count >= 2"),
        "replicas": (int, _REQUIRED, lambda v: v >= 2, "replicas >= 2"),
        "seed": (int, 0, _non_negative, "seed >= 0"),
        "max.particles": (int, 1_000_000, lambda v: v >= 1, "max.particles >= 1"),
    },
    "twopoint": {
        "alpha": (float, _REQUIRED, _unit_interval, "alpha in [0, 1]"),
        "gamma": (float, _REQUIRED, _positive, "gamma > 0"),
        "t.max": (float, _REQUIRED, _positive, "t.max > 0"),
        "t.step": (float, _REQUIRED, _positive, "t.step > 0"),
        "x.halfwidth": (float, _REQUIRED, _positive, "x.halfwidth > 0"),
        "x.step": (float, _REQUIRED, _positive, "x.step > 0"),
        "tol": (float, 1e-8, _positive, "tol > 0"),
        "max.iter": (int, 10_000, lambda v: v >= 1, "max.iter >= 1"),
    },
    "ring-check": {
        "cases": (int, 10_000, lambda v: v >= 1, "cases >= 1"),
        "seed": (int, 0, _non_negative, "seed >= 0"),
    },
}


def _read_pairs(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as err:
        raise ParseError(f"{path}: cannot read config ({err})") from err
    pairs = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not _KEY_RE.match(key):
            raise ParseError(f"{path}:{lineno}: invalid key {key!r} (dotted lowercase)")
        if not value:
            raise ParseError(f"{path}:{lineno}: empty value for {key!r}")
        if key in pairs:
            raise ParseError(f"{path}:{lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def _convert(kind, key, text, target):
    try:
        if target is int:
            return int(text)
        if target is float:
            return float(text)
        return text
    except ValueError as err:
        raise ValidationError(f"{key}: expected {target.__name__}, got {text!r}") from err


def parse_config(path: str, kind: str) -> ExperimentConfig:
    """Read, type, and validate a config file against one subcommand."""
    if kind not in _SCHEMAS:
        raise ValidationError(f"unknown experiment kind {kind!r}")
    pairs = _read_pairs(path)
    declared = pairs.pop("experiment", None)
    if declared is not None and declared != kind:
        raise ValidationError(f"experiment: config declares {declared!r}, subcommand is {kind!r}")
    out = pairs.pop("out", None)
    schema = _SCHEMAS[kind]
    params = {}
    for key, value in pairs.items():
        if key not in schema:
            raise ValidationError(f"{key}: unknown key for '{kind}'")
        target, _, check, constraint = schema[key]
        typed = _convert(kind, key, value, target)
        if not check(typed):
            raise ValidationError(f"{key}: must satisfy {constraint}, got {typed!r}")
        params[key] = typed
    for key, (target, default, check, constraint) in schema.items():
        if key in params:
            continue
        if default is _REQUIRED:
            raise ValidationError(f"{key}: required for '{kind}' ({constraint})")
        params[key] = default
    if kind == "kernel":
        if params["t.max"] < params["t.min"]:
            raise ValidationError("t.max: must be >= t.min")
        if params["r.max"] < params["r.min"]:
            raise ValidationError("r.max: must be >= r.min")
    if kind == "semigroup" and params["u.kind"] == "indicator" and params["u.hi"] < params["u.lo"]:
        raise ValidationError("u.hi: must be >= u.lo")
    return ExperimentConfig(kind=kind, params=params, out=out)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _grid(lo, hi, count):
    return np.linspace(lo, hi, count) if count > 1 else np.array([lo])


def _run_kernel(p):
    origin = np.zeros(p["d"])
    rows = []
    for t in _grid(p["t.min"], p["t.max"], p["t.count"]):
        for r in _grid(p["r.min"], p["r.max"], p["r.count"]):
            target = np.zeros(p["d"])
            target[0] = r
            hk = kernels.heat_kernel(t, origin, target)
            ret = kernels.retarded_propagator_heat((0.0, origin), (t, target), p["gamma"])
            rows.append((t, r, hk, ret))
    return ["t", "r", "heat_kernel", "retarded_propagator"], rows, {}


def _run_semigroup(p):
    nodes = p["grid.origin"] + p["grid.step"] * np.arange(p["grid.count"])
    if p["u.kind"] == "gaussian":
        sig = p["u.sigma"]
        u0 = np.exp(-((nodes - p["u.center"]) ** 2) / (2 * sig * sig)) / math.sqrt(2 * math.pi * sig * sig)
    else:
        u0 = ((nodes >= p["u.lo"]) & (nodes <= p["u.hi"])).astype(float)
    u = kernels.SampledFunction(p["grid.origin"], p["grid.step"], u0)
    evolved = kernels.apply_semigroup(u, p["t"])
    rows = [(x, a, b) for x, a, b in zip(nodes, u.values, evolved.values)]
    return ["x", "u", "evolved"], rows, {}


def _run_clock(p):
    gamma, replicas, seed = p["gamma"], p["replicas"], p["seed"]
    rows = [
        (d, kernels.event_probability(gamma, d))
        for d in _grid(0.0, p["dtau.max"], p["dtau.count"])
    ]
    # Single-particle lifetimes: pure-death law, horizon long enough
    # that the no-event probability exp(-50) is negligible.
    config = montecarlo.BranchingConfig(gamma, dyson.FertilityDistribution((1.0,)))
    horizon = 50.0 / gamma
    times = []
    for r in range(replicas):
        log = montecarlo.simulate_branching(config, horizon, (), seed, replica=r)
        if log.events:
            times.append(log.events[0].time)
    times = np.asarray(times)
    stat, pvalue = montecarlo.lifetime_ks(times, gamma)
    estimates = {
        "lifetime_mean": float(np.mean(times)),
        "lifetime_mean_stderr": float(np.std(times, ddof=1) / math.sqrt(times.size)),
        "lifetime_mean_expected": 1.0 / gamma,
        "ks_statistic": stat,
        "ks_pvalue": pvalue,
    }
    return ["dtau", "event_probability"], rows, estimates


def _run_extinction(p):
    config = montecarlo.BranchingConfig(
        p["gamma"],
        dyson.FertilityDistribution.binary(p["alpha"]),
        max_particles=p["max.particles"],
    )
    times = montecarlo.sample_extinction_times(config, p["horizon"], p["replicas"], p["seed"])
    rows = []
    for tau in _grid(0.0, p["horizon"], p["tau.count"]):
        analytic = dyson.one_point_closed_form(p["alpha"], p["gamma"], tau)
        p_hat = float(np.mean(times <= tau))
        stderr = math.sqrt(p_hat * (1.0 - p_hat) / p["replicas"])
        rows.append((tau, analytic, p_hat, stderr))
    estimates = {
        "final_analytic": rows[-1][1],
        "final_mc_estimate": rows[-1][2],
        "final_mc_stderr": rows[-1][3],
        "eventual_extinction": dyson.extinction_probability(p["alpha"]),
    }
    return ["tau", "analytic", "mc_estimate", "mc_stderr"], rows, estimates


def _run_onepoint(p):
    step = p["tau.step"] if p["tau.step"] is not None else 1e-3 / p["gamma"]
    fertility = dyson.FertilityDistribution.binary(p["alpha"])
    ode = dyson.one_point_ode(fertility, p["gamma"], 0.0, p["tau.max"], step)
    picard = dyson.one_point_picard(p["alpha"], p["gamma"], p["tau.max"], p["picard.order"], step)
    closed = dyson.one_point_closed_form(p["alpha"], p["gamma"], ode.times)
    rows = list(zip(ode.times, closed, ode.values, picard.values))
    estimates = {
        "sup_ode_vs_closed": float(np.max(np.abs(ode.values - closed))),
        "sup_picard_vs_closed": float(np.max(np.abs(picard.values - closed))),
    }
    return ["tau", "closed_form", "ode", "picard"], rows, estimates


def _run_gf(p):
    fertility = dyson.FertilityDistribution.binary(p["alpha"])
    config = montecarlo.BranchingConfig(p["gamma"], fertility, max_particles=p["max.particles"])
    ode = dyson.one_point_ode(fertility, p["gamma"], p["theta"], p["t.max"])
    rows = []
    worst = 0.0
    for t in _grid(0.0, p["t.max"], p["t.count"]):
        if t == 0.0:
            est, err = p["theta"], 0.0
        else:
            est, err = montecarlo.estimate_generating_function(
                config, p["theta"], float(t), p["replicas"], p["seed"]
            )
        analytic = float(ode.value_at(t))
        rows.append((t, analytic, est, err))
        if err > 0:
            worst = max(worst, abs(est - analytic) / err)
    estimates = {"max_abs_deviation_in_stderr": worst}
    return ["t", "ode", "mc_estimate", "mc_stderr"], rows, estimates


def _run_twopoint(p):
    field = dyson.two_point_picard(
        p["alpha"],
        p["gamma"],
        p["t.max"],
        p["t.step"],
        p["x.halfwidth"],
        p["x.step"],
        tol=p["tol"],
        max_iter=p["max.iter"],
    )
    mass = dyson.mass_curve(p["alpha"], p["gamma"], p["t.max"])
    slice_mass = field.spatial_mass()
    rows = []
    for j, t in enumerate(field.times):
        reference = float(mass.value_at(t))
        for i, x in enumerate(field.xs):
            rows.append((t, x, field.values[j, i], slice_mass[j], reference))
    estimates = {
        "residual": dyson.two_point_residual(field, p["alpha"], p["gamma"]),
        "max_mass_mismatch": float(np.max(np.abs(slice_mass - mass.value_at(field.times)))),
    }
    return ["t", "x", "dtilde", "slice_mass", "mass_curve"], rows, estimates


def _run_ring_check(p):
    tol = 1e-12
    errs = pring.self_check(p["cases"], p["seed"])
    rows = [(name, p["cases"], err, tol, err < tol) for name, err in errs.items()]
    estimates = {"max_defect": max(errs.values()), "all_passed": all(e < tol for e in errs.values())}
    return ["property", "cases", "max_defect", "tolerance", "passed"], rows, estimates


_RUNNERS = {
    "kernel": _run_kernel,
    "semigroup": _run_semigroup,
    "clock": _run_clock,
    "extinction": _run_extinction,
    "onepoint": _run_onepoint,
    "gf": _run_gf,
    "twopoint": _run_twopoint,
    "ring-check": _run_ring_check,
}


def _write_csv(path: str, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def run_experiment(config: ExperimentConfig, out: str | None = None) -> int:
    """Execute one experiment: write its CSV and manifest, return exit code.

    The manifest is written even when the computation fails, with the
    error recorded and status "error" (exit code 2).
    """
    csv_path = out or config.out or f"{config.kind}.csv"
    manifest_path = csv_path + ".manifest.json"
    manifest = {
        "command": config.kind,
        "config": dict(sorted(config.params.items())),
        "library_version": __version__,
        "csv": csv_path,
        "status": "ok",
        "error": None,
        "estimates": {},
    }
    started = time.perf_counter()
    try:
        header, rows, estimates = _RUNNERS[config.kind](config.params)
        _write_csv(csv_path, header, rows)
        manifest["estimates"] = estimates
        with open(csv_path, "rb") as fh:
            manifest["csv_sha256"] = hashlib.sha256(fh.read()).hexdigest()
        code = 0
    except Exception as err:  # noqa: BLE001 - every library error maps to exit 2
        manifest["status"] = "error"
        manifest["error"] = f"{type(err).__name__}: {err}"
        print(f"heatfield {config.kind}: {manifest['error']}", file=sys.stderr)
        code = 2
    manifest["duration_seconds"] = time.perf_counter() - started
    with open(manifest_path, "w", encoding="utf-8", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="heatfield",
        description="Branching Brownian motion experiments: analytic solvers vs Monte Carlo.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in _SCHEMAS:
        s = sub.add_parser(kind, help=f"run the '{kind}' experiment")
        s.add_argument("--config", required=True, help="key = value config file")
        s.add_argument("--out", default=None, help="CSV output path (default <kind>.csv)")
    args = parser.parse_args(argv)
    try:
        config = parse_config(args.config, args.command)
    except (ParseError, ValidationError) as err:
        print(f"heatfield {args.command}: {err}", file=sys.stderr)
        return 1
    return run_experiment(config, args.out)


if __name__ == "__main__":
    sys.exit(main())
