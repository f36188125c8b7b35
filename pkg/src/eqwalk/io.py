"""File outputs: CSV schemas per result type plus the JSON run manifest.

Floats are written with repr-faithful precision so identical runs produce
byte-identical data files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_rows(path, header: str, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_position_distribution(dist, path) -> None:
    _write_rows(path, "l,p", zip(dist.sites(), dist.probs))


def write_moments_csv(result, path) -> None:
    rows = zip(result.snapshots, result.mean, result.variance, result.kurtosis,
               result.se_mean, result.se_var)
    _write_rows(path, "t,mean,var,kurtosis,se_mean,se_var", rows)


def write_erw_moments_csv(result, path) -> None:
    rows = zip(result.snapshots, result.mean, result.variance,
               result.se_mean, result.se_var)
    _write_rows(path, "t,mean,var,se_mean,se_var", rows)


def write_trace_csv(series, path) -> None:
    v = np.append(series.velocity, np.nan)  # no increment beyond the horizon
    _write_rows(path, "t,D,v", zip(series.times, series.distance, v))


def write_eigen_csv(rows, path) -> None:
    """rows: iterables (k, t, lam) with lam a length-4 complex vector."""
    def gen():
        for k, t, lam in rows:
            out = [k, t]
            for v in lam:
                out.extend([v.real, v.imag])
            yield out
    header = "k,t," + ",".join(f"re_l{i},im_l{i}" for i in range(1, 5))
    _write_rows(path, header, gen())


def write_channel_moments_csv(result, path) -> None:
    ts = result.times[1:]
    _write_rows(path, "t,var", zip(ts, result.variance[1:]))


def write_fit_json(fit, path) -> None:
    payload = {
        "exponent": fit.exponent,
        "coefficient": fit.coefficient,
        "r_squared": fit.r_squared,
        "window": list(fit.window),
        "stderr": fit.stderr,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_manifest(path, command: str, params: dict, seed, version: str,
                   elapsed_seconds: float) -> None:
    payload = {
        "command": command,
        "params": params,
        "seed": seed,
        "version": version,
        "elapsed_seconds": elapsed_seconds,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
