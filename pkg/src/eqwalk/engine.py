"""Walk engines: coin, shifts, per-trajectory evolution and ensemble averaging.

Two step-size rules are provided.  UNIT reproduces the standard
discrete-time quantum walk (shift magnitude 1 every step).  INTERVAL draws
an integer shift uniformly from {1-t, ..., 1+t} at step t, so the step-size
window grows linearly with time; ensemble averaging over that randomness
realises the dephasing channel whose variance grows cubically.

Randomness discipline
---------------------
Trajectory ``i`` of an ensemble with master seed ``m`` owns the stream
``numpy.random.default_rng(SeedSequence(m, spawn_key=(i,)))``.  Within a
trajectory the draw order is: for each step t = 1..T, first the shift
(INTERVAL only), then the coin-angle jitter (only when noise_epsilon > 0).
Results are therefore reproducible bit-for-bit regardless of scheduling.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import _kernels
from .state import (CoinBlochState, CoinDensity, PositionDistribution,
                    WalkState)

UNIT = "unit"
INTERVAL = "interval"


@dataclass(frozen=True)
class CoinParams:
    """Coin angle theta plus optional per-step uniform jitter of amplitude epsilon."""

    theta: float
    noise_epsilon: float = 0.0

    def __post_init__(self):
        if self.noise_epsilon < 0:
            raise ValueError("noise_epsilon must be >= 0")


@dataclass(frozen=True)
class StepSizeRule:
    """Step-magnitude sampler variant: UNIT (always 1) or INTERVAL (grows with t)."""

    variant: str = UNIT

    def __post_init__(self):
        if self.variant not in (UNIT, INTERVAL):
            raise ValueError(f"unknown step-size rule {self.variant!r}")

    @classmethod
    def unit(cls) -> "StepSizeRule":
        return cls(UNIT)

    @classmethod
    def interval(cls) -> "StepSizeRule":
        return cls(INTERVAL)

    def max_abs_step(self, t: int) -> int:
        return 1 if self.variant == UNIT else t + 1


def sample_step_size(rule: StepSizeRule, t: int, rng) -> int:
    """Shift magnitude for step t.  UNIT consumes no randomness."""
    if t < 1:
        raise ValueError("step index starts at 1")
    if rule.variant == UNIT:
        return 1
    return int(rng.integers(1 - t, t + 2))


def sample_coin_noise(theta: float, epsilon: float, rng) -> float:
    """Effective coin angle theta + xi, xi uniform on [-epsilon, epsilon]."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if epsilon == 0:
        return theta
    return theta + rng.uniform(-epsilon, epsilon)


def apply_coin(state: WalkState, theta: float) -> WalkState:
    """Site-wise coin rotation (cos t, i sin t; i sin t, cos t)."""
    c, s = np.cos(theta), np.sin(theta)
    u, d = state.amp_up, state.amp_down
    return WalkState(state.window_lo,
                     c * u + 1j * s * d,
                     1j * s * u + c * d,
                     state.time)


def apply_shift(state: WalkState, delta: int) -> WalkState:
    """Translate the up component by +delta sites and the down component by -delta."""
    delta = int(delta)
    if delta == 0:
        return state.copy()
    a = abs(delta)
    n = state.amp_up.size
    u = np.zeros(n + 2 * a, dtype=complex)
    d = np.zeros(n + 2 * a, dtype=complex)
    u[a + delta:a + delta + n] = state.amp_up
    d[a - delta:a - delta + n] = state.amp_down
    return WalkState(state.window_lo - a, u, d, state.time)


def step_standard(state: WalkState, coin: CoinParams, rng=None) -> WalkState:
    """One standard-walk step: coin (with optional jitter) then unit shift."""
    theta = coin.theta
    if coin.noise_epsilon > 0:
        if rng is None:
            raise ValueError("noisy coin requires an rng")
        theta = sample_coin_noise(coin.theta, coin.noise_epsilon, rng)
    out = apply_shift(apply_coin(state, theta), 1)
    out.time = state.time + 1
    return out


def step_elephant(state: WalkState, coin: CoinParams, delta: int,
                  theta_t: float | None = None) -> WalkState:
    """One variable-step walk step: coin at angle theta_t then shift by delta."""
    theta = coin.theta if theta_t is None else theta_t
    out = apply_shift(apply_coin(state, theta), delta)
    out.time = state.time + 1
    return out


@dataclass
class TrajectoryRecord:
    """Observables of a single realised trajectory at the snapshot times."""

    seed_entropy: object
    deltas: np.ndarray
    snapshots: np.ndarray
    distributions: list
    coin_densities: list
    moments: np.ndarray  # (n_snap, 5) raw position moments sum l^n P


@dataclass
class EnsembleResult:
    """Trajectory-averaged observables with Monte Carlo standard errors."""

    snapshots: np.ndarray
    n_trajectories: int
    mean: np.ndarray
    variance: np.ndarray
    kurtosis: np.ndarray  # excess kurtosis of the mean distribution
    se_mean: np.ndarray
    se_var: np.ndarray
    mean_distributions: list
    mean_coin_densities: list
    moment1_samples: np.ndarray | None = None
    moment2_samples: np.ndarray | None = None


def trajectory_stream(master_seed, index: int):
    """The RNG stream owned by trajectory ``index`` of an ensemble."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def draw_trajectory_randomness(rng, coin: CoinParams, rule: StepSizeRule, T: int):
    """Realise the per-step shifts and effective coin angles in contract order."""
    deltas = np.empty(T, dtype=np.int64)
    thetas = np.empty(T, dtype=np.float64)
    for t in range(1, T + 1):
        deltas[t - 1] = sample_step_size(rule, t, rng)
        thetas[t - 1] = sample_coin_noise(coin.theta, coin.noise_epsilon, rng)
    return deltas, thetas


def _check_snapshots(snapshots, T: int) -> np.ndarray:
    arr = np.asarray(sorted(snapshots), dtype=np.int64)
    if arr.size == 0:
        raise ValueError("snapshot list must not be empty")
    if arr.min() < 0 or arr.max() > T:
        raise ValueError("snapshots must lie in [0, T]")
    if np.unique(arr).size != arr.size:
        raise ValueError("snapshot times must be distinct")
    return arr


def _buffer_capacity(init: WalkState, rule: StepSizeRule, T: int) -> int:
    reach = sum(rule.max_abs_step(t) for t in range(1, T + 1))
    half = max(abs(init.window_lo), abs(init.window_hi)) + reach + 2
    return 2 * half + 1


def _load_state(init: WalkState, u, d, center):
    lo = center + init.window_lo
    hi = center + init.window_hi
    u[lo:hi + 1] = init.amp_up
    d[lo:hi + 1] = init.amp_down
    return lo, hi


def _run_block(args):
    (init, coin, rule, T, snapshots, master_seed, i0, i1,
     record_dist, keep_samples) = args
    snapshots = np.asarray(snapshots, dtype=np.int64)
    pos = snapshots[snapshots >= 1]
    W = _buffer_capacity(init, rule, T)
    center = W // 2
    u = np.zeros(W, dtype=np.complex128)
    d = np.zeros(W, dtype=np.complex128)
    su = np.zeros(W, dtype=np.complex128)
    sd = np.zeros(W, dtype=np.complex128)
    nsnap = snapshots.size
    dist = np.zeros((nsnap, W)) if record_dist else np.zeros((1, 1))
    msum = np.zeros((nsnap, 5))
    msq = np.zeros((nsnap, 5))
    cross12 = np.zeros(nsnap)
    csum = np.zeros((nsnap, 3), dtype=np.complex128)
    n_blk = i1 - i0
    s1 = np.zeros((n_blk, nsnap)) if keep_samples else None
    s2 = np.zeros((n_blk, nsnap)) if keep_samples else None
    tmp_m = np.zeros((nsnap, 5))
    tmp_c = np.zeros((nsnap, 3), dtype=np.complex128)
    zero_idx = np.flatnonzero(snapshots == 0)
    for i in range(i0, i1):
        rng = trajectory_stream(master_seed, i)
        deltas, thetas = draw_trajectory_randomness(rng, coin, rule, T)
        lo, hi = _load_state(init, u, d, center)
        tmp_m[:] = 0.0
        tmp_c[:] = 0.0
        for z in zero_idx:
            _kernels.snapshot_state(u, d, lo, hi, center, tmp_m[z], tmp_c[z],
                                    dist[z] if record_dist else dist[0], record_dist)
        flo, fhi = _kernels.evolve_walk(
            u, d, su, sd, lo, hi, center, deltas,
            np.cos(thetas), np.sin(thetas),
            pos, tmp_m[nsnap - pos.size:], tmp_c[nsnap - pos.size:],
            dist[nsnap - pos.size:] if record_dist else dist, record_dist)
        msum += tmp_m
        msq += tmp_m ** 2
        cross12 += tmp_m[:, 1] * tmp_m[:, 2]
        csum += tmp_c
        if keep_samples:
            s1[i - i0] = tmp_m[:, 1]
            s2[i - i0] = tmp_m[:, 2]
        u[flo:fhi + 1] = 0.0
        d[flo:fhi + 1] = 0.0
    return msum, msq, cross12, csum, dist, center, s1, s2


def run_trajectory(init: WalkState, coin: CoinParams, rule: StepSizeRule,
                   T: int, snapshots, seed) -> TrajectoryRecord:
    """Evolve one trajectory and record observables at the snapshot times.

    ``seed`` may be an int or a ``numpy.random.SeedSequence`` (ensembles pass
    the per-trajectory child sequence).  Deterministic given its inputs.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    snapshots = _check_snapshots(snapshots, T)
    init.check()
    if isinstance(seed, np.random.SeedSequence):
        sseq = seed
    else:
        sseq = np.random.SeedSequence(seed)
    rng = np.random.default_rng(sseq)
    deltas, thetas = draw_trajectory_randomness(rng, coin, rule, T)

    W = _buffer_capacity(init, rule, T)
    center = W // 2
    u = np.zeros(W, dtype=np.complex128)
    d = np.zeros(W, dtype=np.complex128)
    su = np.zeros_like(u)
    sd = np.zeros_like(d)
    lo, hi = _load_state(init, u, d, center)
    nsnap = snapshots.size
    moments = np.zeros((nsnap, 5))
    coin_sums = np.zeros((nsnap, 3), dtype=np.complex128)
    dist = np.zeros((nsnap, W))
    zero_idx = np.flatnonzero(snapshots == 0)
    for z in zero_idx:
        _kernels.snapshot_state(u, d, lo, hi, center, moments[z], coin_sums[z],
                                dist[z], True)
    pos = snapshots[snapshots >= 1]
    _kernels.evolve_walk(u, d, su, sd, lo, hi, center, deltas,
                         np.cos(thetas), np.sin(thetas),
                         pos, moments[nsnap - pos.size:],
                         coin_sums[nsnap - pos.size:],
                         dist[nsnap - pos.size:], True)
    dists, dens = [], []
    for k in range(nsnap):
        occ = np.flatnonzero(dist[k] > 0.0)
        if occ.size == 0:
            i0d, i1d = center, center
        else:
            i0d, i1d = occ[0], occ[-1]
        dists.append(PositionDistribution(int(i0d - center), dist[k, i0d:i1d + 1].copy()))
        ruu, rdd, rud = coin_sums[k]
        dens.append(CoinDensity(np.array([[ruu, rud], [np.conj(rud), rdd]])))
    return TrajectoryRecord(sseq.entropy, deltas, snapshots, dists, dens, moments)


def run_ensemble(init: WalkState, coin: CoinParams, rule: StepSizeRule,
                 T: int, snapshots, N: int, master_seed,
                 threads: int | None = 1,
                 keep_samples: bool = False) -> EnsembleResult:
    """Average N independent trajectories; see the module docstring for the
    per-trajectory stream construction.

    Mean distributions, mean coin densities and the raw-moment sums are
    accumulated per block of trajectories and merged in block order, so the
    result does not depend on how many workers execute the blocks.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if T < 1:
        raise ValueError("T must be >= 1")
    snapshots = _check_snapshots(snapshots, T)
    init.check()
    if threads is None:
        threads = os.cpu_count() or 1
    block = max(1, min(N, 512))
    blocks = [(a, min(a + block, N)) for a in range(0, N, block)]
    jobs = [(init, coin, rule, T, snapshots, master_seed, a, b,
             True, keep_samples) for a, b in blocks]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(_run_block, jobs))
    else:
        parts = [_run_block(j) for j in jobs]

    nsnap = snapshots.size
    msum = np.zeros((nsnap, 5))
    msq = np.zeros((nsnap, 5))
    cross12 = np.zeros(nsnap)
    csum = np.zeros((nsnap, 3), dtype=np.complex128)
    center = parts[0][5]
    dist = np.zeros_like(parts[0][4])
    s1 = np.zeros((N, nsnap)) if keep_samples else None
    s2 = np.zeros((N, nsnap)) if keep_samples else None
    for (a, b), part in zip(blocks, parts):
        msum += part[0]
        msq += part[1]
        cross12 += part[2]
        csum += part[3]
        dist += part[4]
        if keep_samples:
            s1[a:b] = part[6]
            s2[a:b] = part[7]

    M = msum / N  # raw moments of the mean distribution, columns n = 0..4
    mean = M[:, 1]
    var = M[:, 2] - mean ** 2
    mu4 = M[:, 4] - 4 * mean * M[:, 3] + 6 * mean ** 2 * M[:, 2] - 3 * mean ** 4
    with np.errstate(divide="ignore", invalid="ignore"):
        kurt = np.where(var > 0, mu4 / var ** 2 - 3.0, np.nan)
    if N > 1:
        var1 = (msq[:, 1] - msum[:, 1] ** 2 / N) / (N - 1)
        var2 = (msq[:, 2] - msum[:, 2] ** 2 / N) / (N - 1)
        cov12 = (cross12 - msum[:, 1] * msum[:, 2] / N) / (N - 1)
        se_mean = np.sqrt(np.maximum(var1, 0.0) / N)
        se_var = np.sqrt(np.maximum(
            var2 + 4 * mean ** 2 * var1 - 4 * mean * cov12, 0.0) / N)
    else:
        se_mean = np.zeros(nsnap)
        se_var = np.zeros(nsnap)

    dists, dens = [], []
    for k in range(nsnap):
        occ = np.flatnonzero(dist[k] > 0.0)
        i0d, i1d = (occ[0], occ[-1]) if occ.size else (center, center)
        dists.append(PositionDistribution(int(i0d - center), dist[k, i0d:i1d + 1] / N))
        ruu, rdd, rud = csum[k] / N
        dens.append(CoinDensity(np.array([[ruu, rud], [np.conj(rud), rdd]])))
    return EnsembleResult(snapshots, N, mean, var, kurt, se_mean, se_var,
                          dists, dens, s1, s2)


@dataclass
class ConditionalTables:
    """Empirical statistics of the measured per-step displacements.

    ``counts[a1, ..., at]`` counts trajectories whose measured displacement
    signs were (d1, ..., dt) with index 0 for -1 and 1 for +1.
    """

    t: int
    n_samples: int
    counts: np.ndarray

    @property
    def joint(self) -> np.ndarray:
        return self.counts / self.n_samples

    def joint_se(self) -> np.ndarray:
        p = self.joint
        return np.sqrt(p * (1 - p) / self.n_samples)

    def conditional(self, k: int, prefix: tuple) -> tuple[float, float]:
        """P(step k displacement = +1 | earlier signs) with its binomial SE.

        ``prefix`` holds the k-1 earlier signs as +1/-1 values.
        """
        if len(prefix) != k - 1:
            raise ValueError("prefix must contain k-1 signs")
        idx = tuple((1 if s > 0 else 0) for s in prefix)
        sub = self.counts[idx]
        tot = sub.sum()
        plus = sub[1].sum() if sub.ndim > 0 else np.nan
        if tot == 0:
            return np.nan, np.nan
        p = plus / tot
        return float(p), float(np.sqrt(p * (1 - p) / tot))


def conditional_step_distribution(coin: CoinParams, init: CoinBlochState,
                                  t: int, N: int, seed) -> ConditionalTables:
    """Measure the walker position after every step (collapse) and tabulate
    the joint law of the per-step displacements.

    After the first measured step the walker's coin is a basis state, so
    later steps flip with probability sin^2(theta).  Only t in {2, 3} is
    supported; larger histories are outside the verified regime.
    """
    if t not in (2, 3):
        raise ValueError("conditional tables are only supported for t in {2, 3}")
    if coin.noise_epsilon != 0:
        raise ValueError("conditional tables assume a noiseless coin")
    rng = np.random.default_rng(seed)
    c, s = np.cos(coin.theta), np.sin(coin.theta)
    chi = init.spinor()
    p_first = abs(c * chi[0] + 1j * s * chi[1]) ** 2
    signs = np.empty((N, t), dtype=np.int8)
    up = rng.random(N) < p_first
    signs[:, 0] = np.where(up, 1, -1)
    p_stay = c * c  # P(repeat | basis coin state)
    for k in range(1, t):
        stay = rng.random(N) < p_stay
        signs[:, k] = np.where(stay, signs[:, k - 1], -signs[:, k - 1])
    idx = ((signs + 1) // 2).astype(np.int64)
    flat = np.zeros(2 ** t, dtype=np.int64)
    keys = np.zeros(N, dtype=np.int64)
    for k in range(t):
        keys = keys * 2 + idx[:, k]
    np.add.at(flat, keys, 1)
    return ConditionalTables(t, N, flat.reshape((2,) * t))
