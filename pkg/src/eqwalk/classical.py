"""Classical memory walk (elephant random walk) Monte Carlo.

Each step copies the increment of a uniformly chosen past instant with
probability p and reverses it with probability 1 - p; the first step goes
right with probability q.  The memory parameter controls the long-time
moment scaling: diffusive variance below p = 3/4, superdiffusive variance
growing like t^(4p-2) above, and a drift growing like t^(2p-1) once
p > 1/2 for a biased first step.

Randomness discipline mirrors the quantum engines: trajectory i of an
ensemble draws from default_rng(SeedSequence(master_seed, spawn_key=(i,))),
consuming a (2, T) uniform block whose first row selects past instants and
whose second row decides first-step direction / copy-vs-reverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class ErwParams:
    """Memory parameter p, first-step right probability q, horizon T, trajectories N."""

    p: float
    q: float
    T: int
    N: int = 1

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {self.q}")
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.N < 1:
            raise ValueError("N must be >= 1")


@dataclass
class ErwMoments:
    """Ensemble displacement moments with Monte Carlo standard errors."""

    snapshots: np.ndarray
    n_trajectories: int
    mean: np.ndarray
    variance: np.ndarray
    se_mean: np.ndarray
    se_var: np.ndarray


def _draw_uniforms(rng, T: int) -> np.ndarray:
    return rng.random((2, T))


def run_erw_trajectory(params: ErwParams, seed) -> np.ndarray:
    """One displacement path X_0 .. X_T (X_0 = 0)."""
    rng = np.random.default_rng(seed)
    u = _draw_uniforms(rng, params.T)
    deltas = np.zeros(params.T + 1, dtype=np.int64)
    x = np.zeros(params.T + 1, dtype=np.int64)
    for t in range(1, params.T + 1):
        if t == 1:
            step = 1 if u[1, 0] < params.q else -1
        else:
            j = 1 + min(int(u[0, t - 1] * (t - 1)), t - 2)
            base = deltas[j]
            step = base if u[1, t - 1] < params.p else -base
        deltas[t] = step
        x[t] = x[t - 1] + step
    return x


def erw_ensemble_moments(params: ErwParams, master_seed,
                         snapshots=None, chunk: int = 4096) -> ErwMoments:
    """Displacement mean and variance over N trajectories at the snapshot times."""
    T, N = params.T, params.N
    if snapshots is None:
        snapshots = [2 ** k for k in range(0, T.bit_length()) if 2 ** k <= T]
        if snapshots[-1] != T:
            snapshots.append(T)
    snap = np.asarray(sorted(snapshots), dtype=np.int64)
    if snap.size == 0 or snap.min() < 1 or snap.max() > T:
        raise ValueError("snapshots must lie in [1, T]")
    if np.unique(snap).size != snap.size:
        raise ValueError("snapshot times must be distinct")
    nsnap = snap.size
    s1 = np.zeros(nsnap)
    s2 = np.zeros(nsnap)
    s3 = np.zeros(nsnap)
    s4 = np.zeros(nsnap)
    delta_buf = np.zeros(T + 1, dtype=np.int64)
    for a in range(0, N, chunk):
        b = min(a + chunk, N)
        n = b - a
        u = np.empty((n, 2, T))
        for i in range(n):
            u[i] = _draw_uniforms(
                np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(a + i,))), T)
        out = np.zeros((n, nsnap), dtype=np.int64)
        _kernels.erw_paths(np.ascontiguousarray(u[:, 0, :]),
                           np.ascontiguousarray(u[:, 1, :]),
                           params.p, params.q, snap, delta_buf, out)
        xf = out.astype(np.float64)
        s1 += xf.sum(axis=0)
        s2 += (xf ** 2).sum(axis=0)
        s3 += (xf ** 3).sum(axis=0)
        s4 += (xf ** 4).sum(axis=0)
    mean = s1 / N
    var = s2 / N - mean ** 2
    se_mean = np.sqrt(np.maximum(var, 0.0) / N)
    # se of the variance estimator via its fourth central moment
    mu4 = s4 / N - 4 * mean * s3 / N + 6 * mean ** 2 * s2 / N - 3 * mean ** 4
    se_var = np.sqrt(np.maximum(mu4 - var ** 2, 0.0) / N)
    return ErwMoments(snap, N, mean, var, se_mean, se_var)


@dataclass
class ConditionalCheck:
    analytic: float
    empirical: float
    se: float
    z: float
    n_samples: int


def next_step_probability(p: float, history, ell: int) -> float:
    """Closed-form P(next step = ell | history) for the memory rule.

    Averaging the copy/reverse rule over the uniformly chosen past instant
    gives sum_j [1 - (1-2p) ell Delta_j] / (2t).
    """
    h = np.asarray(history, dtype=np.int64)
    if h.size == 0 or not np.all(np.abs(h) == 1):
        raise ValueError("history must be a nonempty sequence of +1/-1 steps")
    if ell not in (1, -1):
        raise ValueError("ell must be +1 or -1")
    t = h.size
    return float(np.sum(1.0 - (1.0 - 2.0 * p) * ell * h) / (2.0 * t))


def erw_conditional_check(p: float, history, N: int, seed,
                          ell: int = 1) -> ConditionalCheck:
    """Compare the closed-form conditional with N fresh continuations."""
    h = np.asarray(history, dtype=np.int64)
    analytic = next_step_probability(p, h, ell)
    rng = np.random.default_rng(seed)
    t = h.size
    j = rng.integers(0, t, size=N)
    base = h[j]
    keep = rng.random(N) < p
    step = np.where(keep, base, -base)
    emp = float(np.mean(step == ell))
    se = float(np.sqrt(max(analytic * (1 - analytic), 1e-300) / N))
    z = (emp - analytic) / se if se > 0 else np.inf
    return ConditionalCheck(analytic, emp, se, float(z), N)
