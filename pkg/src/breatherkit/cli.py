"""Command-line front end: strict config parsing and bit-stable outputs.

Every output embeds the tool version, the resolved config, and the master
seed, and serializes floats as shortest round-trip decimals, so a rerun with
the same config and seed reproduces the files byte for byte at any thread
count. Exit codes: 0 success, 2 config error, 3 precondition error,
4 solver or verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .analysis import fit_tail, mean_s, proof_tail_constant
from .discretize import GridSpec, add_potential, neumann_laplacian
from .eigensolve import DENSE_LIMIT, smallest_eigs_dense, smallest_eigs_iterative
from .errors import BreatherkitError, ConfigError, VerificationError
from .montecarlo import (EnsembleSpec, concentration_probability, estimate_ids,
                         IDSCurve, scheduled_ids)
from .potential import BaseSet, ScaleDistribution, assemble_field, \
    load_baseset, sample_scales
from .thirring import ground_state_lower_bound

_COMMANDS = ("spectrum", "ids", "thirring-verify", "concentration", "tailfit")


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _as_int(cfg: dict, key: str, minimum: int) -> int:
    value = cfg[key]
    _require(isinstance(value, int) and not isinstance(value, bool),
             f"config field {key!r} must be an integer, got {value!r}")
    _require(value >= minimum, f"config field {key!r} must be >= {minimum}")
    return value


def _as_float(cfg: dict, key: str, positive: bool = False) -> float:
    value = cfg[key]
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             f"config field {key!r} must be a number, got {value!r}")
    if positive:
        _require(value > 0, f"config field {key!r} must be positive")
    return float(value)


def _resolve_energies(value) -> list[float]:
    if isinstance(value, dict):
        keys = set(value)
        _require(keys <= {"start", "stop", "count", "spacing"},
                 f"unknown energy-range keys {sorted(keys - {'start', 'stop', 'count', 'spacing'})}")
        _require({"start", "stop", "count"} <= keys,
                 "energy range needs 'start', 'stop' and 'count'")
        spacing = value.get("spacing", "log")
        _require(spacing in ("log", "linear"),
                 f"energy spacing must be 'log' or 'linear', got {spacing!r}")
        start, stop, count = value["start"], value["stop"], value["count"]
        _require(isinstance(count, int) and count >= 2,
                 "energy range 'count' must be an integer >= 2")
        _require(0 < start < stop if spacing == "log" else start < stop,
                 "energy range needs start < stop (and start > 0 for log spacing)")
        if spacing == "log":
            grid = np.geomspace(start, stop, count)
        else:
            grid = np.linspace(start, stop, count)
        return [float(e) for e in grid]
    _require(isinstance(value, list) and len(value) >= 1,
             "config field 'energies' must be a list or a range object")
    energies = []
    for e in value:
        _require(isinstance(e, (int, float)) and not isinstance(e, bool),
                 f"energies must be numbers, got {e!r}")
        energies.append(float(e))
    _require(all(b > a for a, b in zip(energies, energies[1:])),
             "energies must be strictly ascending")
    return energies


_SCHEMAS = {
    "spectrum": ({"d", "L", "n", "baseset", "distribution", "samples", "seed"},
                 {"tolerance", "out", "k", "verify_thirring"}),
    "ids": ({"d", "L", "n", "baseset", "distribution", "samples", "seed",
             "energies"}, {"tolerance", "out"}),
    "thirring-verify": ({"d", "L", "n", "baseset", "distribution", "samples",
                         "seed"}, {"tolerance", "out"}),
    "concentration": ({"d", "L", "baseset", "distribution", "samples", "seed"},
                      {"out"}),
}


def _load_config(path: str, command: str, seed_override: Optional[int],
                 out_override: Optional[str]) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    _require(isinstance(raw, dict), "config must be a JSON object")

    if command == "tailfit":
        if "ids_csv" in raw:
            required, optional = {"ids_csv", "window"}, {"e0", "out"}
        else:
            required = {"d", "n", "baseset", "distribution", "samples", "seed",
                        "energies", "window"}
            optional = {"e0", "tolerance", "out"}
    else:
        required, optional = _SCHEMAS[command]

    keys = set(raw)
    unknown = keys - required - optional
    _require(not unknown,
             f"unknown config keys for {command}: {sorted(unknown)}")
    missing = required - keys
    _require(not missing,
             f"missing config keys for {command}: {sorted(missing)}")

    cfg = dict(raw)
    if seed_override is not None and "seed" in required:
        cfg["seed"] = seed_override
    if out_override is not None:
        cfg["out"] = out_override
    _require("out" in cfg, "no output directory: set 'out' in the config "
             "or pass --out")

    if "d" in cfg:
        cfg["d"] = _as_int(cfg, "d", 1)
    if "n" in cfg:
        cfg["n"] = _as_int(cfg, "n", 1)
    if "samples" in cfg:
        cfg["samples"] = _as_int(cfg, "samples", 1)
    if "seed" in cfg:
        cfg["seed"] = _as_int(cfg, "seed", 0)
    if "L" in cfg:
        if command == "concentration":
            _require(isinstance(cfg["L"], list) and len(cfg["L"]) >= 1,
                     "concentration needs 'L' as a list of box half-lengths")
            _require(all(isinstance(v, int) and not isinstance(v, bool)
                         and v >= 1 for v in cfg["L"]),
                     "'L' entries must be integers >= 1")
        else:
            cfg["L"] = _as_int(cfg, "L", 1)
    cfg["tolerance"] = (_as_float(cfg, "tolerance", positive=True)
                        if "tolerance" in cfg else 1e-10)
    if "energies" in cfg:
        cfg["energies"] = _resolve_energies(cfg["energies"])
    if "k" in cfg:
        cfg["k"] = _as_int(cfg, "k", 1)
    elif command == "spectrum":
        cfg["k"] = 3
    if command == "spectrum":
        value = cfg.get("verify_thirring", False)
        _require(isinstance(value, bool), "'verify_thirring' must be a boolean")
        cfg["verify_thirring"] = value
    if "window" in cfg:
        win = cfg["window"]
        _require(isinstance(win, list) and len(win) == 2
                 and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                         for v in win) and 0 <= win[0] < win[1],
                 "'window' must be [low, high] with 0 <= low < high")
        cfg["window"] = [float(win[0]), float(win[1])]
    if "e0" in cfg:
        cfg["e0"] = _as_float(cfg, "e0")
    elif command == "tailfit":
        cfg["e0"] = 0.0

    if "distribution" in cfg:
        _require(isinstance(cfg["distribution"], str),
                 "'distribution' must be a string spec")
        try:
            ScaleDistribution.parse(cfg["distribution"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return cfg


def _load_base(cfg: dict) -> BaseSet:
    try:
        return load_baseset(cfg["baseset"])
    except FileNotFoundError:
        raise ConfigError(f"mask file not found: {cfg['baseset']}") from None


def _config_blob(command: str, cfg: dict) -> str:
    # everything needed to reproduce the numbers; output placement and
    # parallelism degree are excluded so reruns compare byte-for-byte
    echo = {k: v for k, v in cfg.items() if k != "out"}
    echo["tool"] = "breatherkit"
    echo["version"] = __version__
    echo["command"] = command
    return json.dumps(echo, sort_keys=True, separators=(",", ":"))


def _write_outputs(cfg: dict, command: str, filename: str, text: str) -> Path:
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = filename.split(".")[0]
    echo_path = out_dir / f"{stem}_config.json"
    echo_path.write_text(_config_blob(command, cfg) + "\n")
    target = out_dir / filename
    target.write_text(text)
    return target


def _csv_text(command: str, cfg: dict, columns: Sequence[str],
              rows: Sequence[Sequence]) -> str:
    lines = [
        f"# breatherkit {__version__}",
        f"# command={command}",
        f"# seed={cfg.get('seed', '')}",
        f"# config={_config_blob(command, cfg)}",
        ",".join(columns),
    ]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def run_spectrum(cfg: dict, threads: int) -> None:
    base = _load_base(cfg)
    spec = EnsembleSpec(base, ScaleDistribution.parse(cfg["distribution"]),
                        cfg["d"], cfg["L"], cfg["n"], cfg["samples"],
                        cfg["seed"], cfg["tolerance"])
    grid = spec.grid
    free_op = neumann_laplacian(grid)
    k = min(cfg["k"], grid.size)
    rows = []
    failures = []
    for m in range(spec.samples):
        scales = sample_scales(spec.dist, spec.d, spec.L, spec.seed, m)
        fld = assemble_field(scales, base, grid)
        op = add_potential(free_op, fld)
        if grid.size <= DENSE_LIMIT:
            result = smallest_eigs_dense(op, k)
        else:
            result = smallest_eigs_iterative(op, k, tol=cfg["tolerance"],
                                             start_seed=m)
        for i in range(k):
            rows.append((m, i, result.eigenvalues[i], result.residuals[i]))
        if cfg["verify_thirring"]:
            report = ground_state_lower_bound(scales, base, grid,
                                              tol=cfg["tolerance"])
            if not report.verified:
                failures.append(m)
    target = _write_outputs(cfg, "spectrum", "spectrum.csv", _csv_text(
        "spectrum", cfg, ("sample", "index", "eigenvalue", "residual"), rows))
    if failures:
        raise VerificationError(
            f"ground-state bound violated on samples {failures}; see {target}"
        )


def run_ids(cfg: dict, threads: int) -> None:
    base = _load_base(cfg)
    spec = EnsembleSpec(base, ScaleDistribution.parse(cfg["distribution"]),
                        cfg["d"], cfg["L"], cfg["n"], cfg["samples"],
                        cfg["seed"], cfg["tolerance"])
    _require(spec.grid.size <= DENSE_LIMIT,
             f"grid size {spec.grid.size} exceeds the dense counting limit "
             f"{DENSE_LIMIT}")
    curve = estimate_ids(spec, cfg["energies"], threads=threads)
    rows = [(e, v, s, curve.samples) for e, v, s in
            zip(curve.energies, curve.estimates, curve.stderrs)]
    _write_outputs(cfg, "ids", "ids.csv", _csv_text(
        "ids", cfg, ("energy", "estimate", "stderr", "samples"), rows))


def run_thirring(cfg: dict, threads: int) -> None:
    base = _load_base(cfg)
    dist = ScaleDistribution.parse(cfg["distribution"])
    grid = GridSpec(cfg["d"], cfg["L"], cfg["n"])
    rows = []
    failures = []
    for m in range(cfg["samples"]):
        scales = sample_scales(dist, cfg["d"], cfg["L"], cfg["seed"], m)
        report = ground_state_lower_bound(scales, base, grid,
                                          tol=cfg["tolerance"])
        rows.append((m, report.gamma, report.s_grid, report.inner,
                     report.bound, report.e1_perturbed, report.slack))
        if not report.verified:
            failures.append(m)
    target = _write_outputs(cfg, "thirring-verify", "thirring.csv", _csv_text(
        "thirring-verify", cfg,
        ("sample", "gamma", "S_grid", "inner", "bound", "E1", "slack"), rows))
    if failures:
        raise VerificationError(
            f"ground-state bound violated on samples {failures}; see {target}"
        )


def run_concentration(cfg: dict, threads: int) -> None:
    base = _load_base(cfg)
    dist = ScaleDistribution.parse(cfg["distribution"])
    table = concentration_probability(base, dist, cfg["d"], cfg["L"],
                                      cfg["samples"], cfg["seed"],
                                      threads=threads)
    rows = [(L, (2 * L) ** cfg["d"], p.successes, p.trials, p.estimate,
             p.ci_low, p.ci_high) for L, p in table]
    _write_outputs(cfg, "concentration", "concentration.csv", _csv_text(
        "concentration", cfg,
        ("L", "two_L_pow_d", "successes", "trials", "estimate", "ci_low",
         "ci_high"), rows))


def read_ids_csv(path) -> tuple[IDSCurve, dict]:
    """Load a curve written by the ids command, config header included."""
    lines = Path(path).read_text().splitlines()
    meta = {}
    body = []
    for line in lines:
        if line.startswith("# config="):
            meta = json.loads(line[len("# config="):])
        elif line.startswith("#") or not line.strip():
            continue
        else:
            body.append(line)
    if not meta or not body:
        raise ConfigError(f"{path} is not an ids CSV with an embedded config")
    header, *data = body
    if header.split(",") != ["energy", "estimate", "stderr", "samples"]:
        raise ConfigError(f"{path} has unexpected columns {header!r}")
    cols = np.array([[float(v) for v in line.split(",")] for line in data])
    return IDSCurve(cols[:, 0], cols[:, 1], cols[:, 2], int(cols[0, 3]),
                    meta["d"], meta["L"], meta["n"], meta["seed"]), meta


def run_tailfit(cfg: dict, threads: int) -> None:
    window = (cfg["window"][0], cfg["window"][1])
    schedule = None
    if "ids_csv" in cfg:
        curve, meta = read_ids_csv(cfg["ids_csv"])
        d = int(meta["d"])
    else:
        base = _load_base(cfg)
        dist = ScaleDistribution.parse(cfg["distribution"])
        d = cfg["d"]
        curve, choices = scheduled_ids(base, dist, d, cfg["n"],
                                       cfg["energies"], cfg["samples"],
                                       cfg["seed"], threads=threads)
        ms = mean_s(dist, base, d)
        schedule = {
            "mean_s1": ms,
            "boxes": [int(L) for L in np.atleast_1d(curve.L)],
            "admissible": [bool(c.admissible) for c in choices],
        }
    fit = fit_tail(curve, cfg["e0"], d, window)
    payload = {
        "tool": "breatherkit",
        "version": __version__,
        "command": "tailfit",
        "config": json.loads(_config_blob("tailfit", cfg)),
        "window": list(fit.window),
        "slope": fit.slope,
        "intercept": fit.intercept,
        "c_front": fit.c_front,
        "c_exp": fit.c_exp,
        "residual_norm": fit.residual_norm,
        "n_points": fit.n_points,
        "curve": {
            "energies": [float(e) for e in curve.energies],
            "estimates": [float(v) for v in curve.estimates],
            "stderrs": [float(s) for s in curve.stderrs],
            "samples": curve.samples,
        },
    }
    if schedule is not None:
        payload["schedule"] = schedule
        payload["proof_c_exp_per_unit_rate"] = proof_tail_constant(
            1.0, schedule["mean_s1"], d)
    _write_outputs(cfg, "tailfit", "tailfit.json",
                   json.dumps(payload, sort_keys=True, indent=2) + "\n")


_RUNNERS = {
    "spectrum": run_spectrum,
    "ids": run_ids,
    "thirring-verify": run_thirring,
    "concentration": run_concentration,
    "tailfit": run_tailfit,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="breatherkit",
        description="Monte Carlo and verification toolkit for random "
                    "breather Schrodinger operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--threads", type=int, default=1,
                       help="sample-level parallelism (output-invariant)")
        p.add_argument("--out", default=None,
                       help="override the config output directory")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config, args.command, args.seed, args.out)
        _RUNNERS[args.command](cfg, max(1, args.threads))
    except BreatherkitError as exc:
        print(f"breatherkit {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
