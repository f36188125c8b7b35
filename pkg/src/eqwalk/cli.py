"""Batch command-line front end.

Subcommands: standard, elephant, classical, trace-distance, kspace-eigen,
exact-channel, fit.  Every run writes its data files plus a manifest.json
echoing the resolved parameters, the master seed, the tool version and the
wall-clock time; identical configuration and seed produce byte-identical
data files.  A JSON config file mirroring the flags (or a previous run's
manifest) can stand in for the flags; explicit flags win over the file.

Exit codes: 0 success, 2 configuration error (bad flag value or range,
message names the offending field), 1 runtime error (aliasing guard,
fit-window too small, ...).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, io
from .analysis import fit_power_law, trace_distance_experiment
from .classical import ErwParams, erw_ensemble_moments
from .engine import CoinParams, StepSizeRule, run_ensemble
from .spectral import (averaged_step_matrix, eigenvalues,
                       evolve_two_point_channel, AliasingGuardError)
from .state import CoinBlochState, GaussianPacketSpec, make_gaussian_packet, make_localized


class ConfigError(ValueError):
    pass


_PI_RE = re.compile(r"^\s*([+-]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$",
                    re.IGNORECASE)


def parse_angle(text) -> float:
    """Angle in radians; accepts plain floats and pi fractions like 'pi/4' or '3pi/4'."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _PI_RE.match(text)
    if m:
        num = m.group(1)
        coef = float(num) if num not in ("", "+", "-") else float(num + "1")
        den = float(m.group(2)) if m.group(2) else 1.0
        return coef * np.pi / den
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r}") from None


def _parse_int_list(text):
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    try:
        return [int(v) for v in str(text).split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigError(f"cannot parse integer list {text!r}") from None


def geometric_snapshots(T: int):
    """Powers of two up to T, with T appended when it is not itself one."""
    snaps = [2 ** k for k in range(T.bit_length()) if 2 ** k <= T]
    if snaps[-1] != T:
        snaps.append(T)
    return snaps


def _check_range(name, value, lo=None, hi=None, strict_lo=False):
    if lo is not None and (value <= lo if strict_lo else value < lo):
        raise ConfigError(f"{name} must be {'>' if strict_lo else '>='} {lo}, got {value}")
    if hi is not None and value > hi:
        raise ConfigError(f"{name} must be <= {hi}, got {value}")
    return value


def _add_common(p, with_seed=True):
    p.add_argument("--out", default=None, help="output directory (default: cwd)")
    p.add_argument("--config", default=None,
                   help="JSON file of parameters (flags 1:1, or a manifest)")
    p.add_argument("--format", dest="format", default=None, choices=["csv", "json"],
                   help="data file format (default csv)")
    if with_seed:
        p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--threads", type=int, default=None,
                   help="worker pool size (default: machine parallelism)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eqwalk",
                                 description="quantum walk and memory-walk experiments")
    ap.add_argument("--version", action="version", version=f"eqwalk {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("standard", help="unit-step walk ensemble (exact when noiseless)")
    p.add_argument("--theta", default=None)
    p.add_argument("--gamma", default=None)
    p.add_argument("--phi", default=None)
    p.add_argument("--delta", type=float, default=None,
                   help="Gaussian packet width parameter (omit for a point source)")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--trajectories", type=int, default=None)
    p.add_argument("--snapshots", default=None)
    p.add_argument("--noise-epsilon", dest="noise_epsilon", type=float, default=None)
    _add_common(p)

    p = sub.add_parser("elephant", help="growing-step walk ensemble")
    p.add_argument("--theta", default=None)
    p.add_argument("--gamma", default=None)
    p.add_argument("--phi", default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--trajectories", type=int, default=None)
    p.add_argument("--snapshots", default=None)
    p.add_argument("--noise-epsilon", dest="noise_epsilon", type=float, default=None)
    _add_common(p)

    p = sub.add_parser("classical", help="classical memory-walk ensemble")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--trajectories", type=int, default=None)
    p.add_argument("--snapshots", default=None)
    _add_common(p)

    p = sub.add_parser("trace-distance", help="two-ensemble trace-distance witness")
    p.add_argument("--theta", default=None)
    p.add_argument("--gamma-a", dest="gamma_a", default=None)
    p.add_argument("--gamma-b", dest="gamma_b", default=None)
    p.add_argument("--phi", default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--trajectories", type=int, default=None)
    p.add_argument("--rule", choices=["unit", "interval"], default=None)
    p.add_argument("--noise-epsilon", dest="noise_epsilon", type=float, default=None)
    _add_common(p)

    p = sub.add_parser("kspace-eigen", help="eigenvalues of the averaged step matrix")
    p.add_argument("--theta", default=None)
    p.add_argument("--times", default=None, help="comma-separated t values")
    p.add_argument("--k-min", dest="k_min", type=float, default=None)
    p.add_argument("--k-max", dest="k_max", type=float, default=None)
    p.add_argument("--k-points", dest="k_points", type=int, default=None)
    p.add_argument("--kernel", choices=["continuous", "discrete"], default=None)
    _add_common(p, with_seed=False)

    p = sub.add_parser("exact-channel", help="exact averaged-channel evolution")
    p.add_argument("--theta", default=None)
    p.add_argument("--gamma", default=None)
    p.add_argument("--phi", default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--lattice", type=int, default=None, help="ring size M (power of two)")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--snapshots", default=None,
                   help="times at which to reconstruct P(l); empty to skip")
    p.add_argument("--kernel", choices=["discrete", "unit"], default=None)
    _add_common(p, with_seed=False)

    p = sub.add_parser("fit", help="power-law fit of a moments column")
    p.add_argument("--input", default=None, help="moments CSV file")
    p.add_argument("--column", default=None, help="column to fit (default var)")
    p.add_argument("--t-min", dest="t_min", type=float, default=None)
    p.add_argument("--t-max", dest="t_max", type=float, default=None)
    _add_common(p, with_seed=False)
    return ap


DEFAULTS = {
    "standard": {"theta": "pi/4", "gamma": "pi/2", "phi": "0", "delta": None,
                 "steps": 100, "trajectories": 1, "snapshots": None,
                 "noise_epsilon": 0.0, "seed": 0, "threads": None},
    "elephant": {"theta": "pi/4", "gamma": "pi/2", "phi": "0", "delta": None,
                 "steps": 128, "trajectories": 1000, "snapshots": None,
                 "noise_epsilon": 0.0, "seed": 0, "threads": None},
    "classical": {"p": 0.5, "q": 0.5, "steps": 1024, "trajectories": 10000,
                  "snapshots": None, "seed": 0, "threads": None},
    "trace-distance": {"theta": "pi/4", "gamma_a": "0", "gamma_b": "pi",
                       "phi": "0", "delta": 0.001, "steps": 100,
                       "trajectories": 1000, "rule": "interval",
                       "noise_epsilon": 0.0, "seed": 0, "threads": None},
    "kspace-eigen": {"theta": "pi/4", "times": "1,2,5,10,20,50",
                     "k_min": 1e-4, "k_max": 2e-3, "k_points": 16,
                     "kernel": "continuous", "threads": None},
    "exact-channel": {"theta": "pi/4", "gamma": "pi/2", "phi": "0", "delta": None,
                      "lattice": 256, "steps": 32, "snapshots": "",
                      "kernel": "discrete", "threads": None},
    "fit": {"input": "moments.csv", "column": "var", "t_min": None,
            "t_max": None, "threads": None},
}


def _resolve(args) -> dict:
    cmd = args.command
    cfg = dict(DEFAULTS[cmd])
    cfg["out"] = "."
    cfg["format"] = "csv"
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"config: cannot read {args.config}: {e}") from None
        if "command" in raw and "params" in raw:  # a manifest
            if raw["command"] != cmd:
                raise ConfigError(
                    f"config: manifest is for command {raw['command']!r}, not {cmd!r}")
            file_params = dict(raw["params"])
            if "seed" in raw and raw["seed"] is not None:
                file_params.setdefault("seed", raw["seed"])
        else:
            file_params = raw
        for key, val in file_params.items():
            k = key.replace("-", "_")
            if k in cfg or k in ("out", "format"):
                cfg[k] = val
            else:
                raise ConfigError(f"config: unknown parameter {key!r} for {cmd}")
    for key, val in vars(args).items():
        if key in ("command", "config"):
            continue
        if val is not None:
            cfg[key] = val
    return cfg


def _coin_state(cfg, gamma_key="gamma"):
    gamma = parse_angle(cfg[gamma_key])
    phi = parse_angle(cfg["phi"])
    _check_range(gamma_key, gamma, 0.0, np.pi)
    return CoinBlochState(gamma, phi)


def _initial_state(cfg, gamma_key="gamma"):
    coin = _coin_state(cfg, gamma_key)
    if cfg.get("delta") is None:
        return make_localized(0, coin)
    _check_range("delta", cfg["delta"], 0.0, strict_lo=True)
    return make_gaussian_packet(GaussianPacketSpec(0, cfg["delta"]), coin)


def _table_path(outdir: Path, stem: str, fmt: str) -> Path:
    return outdir / f"{stem}.{ 'json' if fmt == 'json' else 'csv'}"


def _emit(writer_csv, obj, outdir: Path, stem: str, fmt: str):
    path = _table_path(outdir, stem, fmt)
    if fmt == "csv":
        writer_csv(obj, path)
    else:
        tmp = _table_path(outdir, stem, "csv")
        writer_csv(obj, tmp)
        rows = [line.split(",") for line in tmp.read_text().strip().split("\n")]
        tmp.unlink()
        hdr = rows[0]
        payload = [dict(zip(hdr, r)) for r in rows[1:]]
        path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def _run_walk_command(cfg, rule: StepSizeRule, outdir: Path):
    theta = parse_angle(cfg["theta"])
    _check_range("theta", theta, 0.0, np.pi)
    _check_range("noise-epsilon", cfg["noise_epsilon"], 0.0)
    T = _check_range("steps", int(cfg["steps"]), 1)
    N = _check_range("trajectories", int(cfg["trajectories"]), 1)
    snaps = _parse_int_list(cfg["snapshots"]) if cfg["snapshots"] else geometric_snapshots(T)
    init = _initial_state(cfg)
    coin = CoinParams(theta, cfg["noise_epsilon"])
    res = run_ensemble(init, coin, rule, T, snaps, N, cfg["seed"],
                       threads=cfg["threads"])
    io_files = [_emit(io.write_moments_csv, res, outdir, "moments", cfg["format"])]
    for t, dist in zip(res.snapshots, res.mean_distributions):
        io_files.append(_emit(io.write_position_distribution, dist, outdir,
                              f"dist_t{int(t)}", cfg["format"]))
    return io_files


def run_command(argv) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    t0 = time.time()
    try:
        cfg = _resolve(args)
        outdir = Path(cfg["out"])
        outdir.mkdir(parents=True, exist_ok=True)
        cmd = args.command
        if cfg.get("threads") is None:
            cfg["threads"] = os.cpu_count() or 1
        if cmd == "standard":
            _run_walk_command(cfg, StepSizeRule.unit(), outdir)
        elif cmd == "elephant":
            _run_walk_command(cfg, StepSizeRule.interval(), outdir)
        elif cmd == "classical":
            _check_range("p", cfg["p"], 0.0, 1.0)
            _check_range("q", cfg["q"], 0.0, 1.0)
            T = _check_range("steps", int(cfg["steps"]), 1)
            N = _check_range("trajectories", int(cfg["trajectories"]), 1)
            snaps = _parse_int_list(cfg["snapshots"]) if cfg["snapshots"] else None
            params = ErwParams(cfg["p"], cfg["q"], T, N)
            res = erw_ensemble_moments(params, cfg["seed"], snapshots=snaps)
            _emit(io.write_erw_moments_csv, res, outdir, "erw_moments", cfg["format"])
        elif cmd == "trace-distance":
            theta = parse_angle(cfg["theta"])
            _check_range("theta", theta, 0.0, np.pi)
            _check_range("delta", cfg["delta"], 0.0, strict_lo=True)
            T = _check_range("steps", int(cfg["steps"]), 1)
            N = _check_range("trajectories", int(cfg["trajectories"]), 1)
            rule = StepSizeRule(cfg["rule"])
            series = trace_distance_experiment(
                _coin_state(cfg, "gamma_a"), _coin_state(cfg, "gamma_b"),
                GaussianPacketSpec(0, cfg["delta"]),
                CoinParams(theta, cfg["noise_epsilon"]), rule, T, N, cfg["seed"])
            _emit(io.write_trace_csv, series, outdir, "trace", cfg["format"])
        elif cmd == "kspace-eigen":
            theta = parse_angle(cfg["theta"])
            times = _parse_int_list(cfg["times"])
            if not times or min(times) < 1:
                raise ConfigError("times must be positive integers")
            _check_range("k-points", int(cfg["k_points"]), 2)
            if not 0 < cfg["k_min"] < cfg["k_max"]:
                raise ConfigError("k-min/k-max must satisfy 0 < k-min < k-max")
            ks = np.geomspace(cfg["k_min"], cfg["k_max"], int(cfg["k_points"]))
            rows = []
            for t in times:
                for k in ks:
                    lam = eigenvalues(averaged_step_matrix(k, theta, t, cfg["kernel"]))
                    rows.append((k, t, lam))
            _emit(io.write_eigen_csv, rows, outdir, "eigen", cfg["format"])
        elif cmd == "exact-channel":
            theta = parse_angle(cfg["theta"])
            M = _check_range("lattice", int(cfg["lattice"]), 2)
            T = _check_range("steps", int(cfg["steps"]), 1)
            snaps = _parse_int_list(cfg["snapshots"]) if cfg["snapshots"] else []
            res = evolve_two_point_channel(M, T, theta, _initial_state(cfg),
                                           kernel=cfg["kernel"], snapshots=snaps)
            _emit(io.write_channel_moments_csv, res, outdir, "channel_moments",
                  cfg["format"])
            for t, dist in zip(res.snapshots, res.distributions):
                _emit(io.write_position_distribution, dist, outdir,
                      f"dist_t{int(t)}", cfg["format"])
        elif cmd == "fit":
            path = Path(cfg["input"])
            if not path.exists():
                raise ConfigError(f"input: no such file {path}")
            with open(path) as fh:
                header = fh.readline().strip().split(",")
                data = np.loadtxt(fh, delimiter=",", ndmin=2)
            if cfg["column"] not in header:
                raise ConfigError(f"column: {cfg['column']!r} not in {header}")
            tcol = data[:, header.index("t")]
            vcol = data[:, header.index(cfg["column"])]
            window = (cfg["t_min"] if cfg["t_min"] is not None else tcol.min(),
                      cfg["t_max"] if cfg["t_max"] is not None else tcol.max())
            fit = fit_power_law(tcol, vcol, window)
            io.write_fit_json(fit, outdir / "fit.json")
        io.write_manifest(outdir / "manifest.json", cmd,
                          {k: v for k, v in cfg.items() if k not in ("out", "seed")},
                          cfg.get("seed"), __version__, time.time() - t0)
        return 0
    except ConfigError as e:
        print(f"eqwalk: configuration error: {e}", file=sys.stderr)
        return 2
    except (AliasingGuardError, ValueError) as e:
        print(f"eqwalk: runtime error: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
