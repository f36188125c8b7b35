"""Statistical post-processing: moments, power-law fits, Gaussianity checks,
trace distance and the memory (BLP-style) witness built on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import _kernels
from .engine import (CoinParams, StepSizeRule, _buffer_capacity, _load_state,
                     draw_trajectory_randomness, trajectory_stream)
from .state import (CoinBlochState, CoinDensity, GaussianPacketSpec,
                    PositionDistribution, make_gaussian_packet)


def moments(dist: PositionDistribution):
    """Mean, variance and excess kurtosis of a lattice distribution.

    The excess kurtosis is NaN for a single-site (zero-variance) input.
    """
    p = dist.probs / dist.probs.sum()
    l = dist.sites().astype(float)
    mean = float(np.dot(l, p))
    dl = l - mean
    var = float(np.dot(dl ** 2, p))
    if var <= 0:
        return mean, var, float("nan")
    mu4 = float(np.dot(dl ** 4, p))
    return mean, var, mu4 / var ** 2 - 3.0


@dataclass
class PowerLawFit:
    """Least-squares fit of value = c * t^alpha on log-log axes."""

    exponent: float
    coefficient: float
    r_squared: float
    window: tuple
    stderr: float
    stderr_log_coefficient: float


def fit_power_law(times, values, window=None) -> PowerLawFit:
    """Fit a power law over the (inclusive) time window.

    Requires at least 5 points with strictly positive times and values.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if window is None:
        window = (t.min(), t.max())
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError("fit window must satisfy t_min < t_max")
    sel = (t >= lo) & (t <= hi)
    if sel.sum() < 5:
        raise ValueError(f"need at least 5 points in the fit window, got {int(sel.sum())}")
    if (t[sel] <= 0).any() or (v[sel] <= 0).any():
        raise ValueError("power-law fit needs positive times and values")
    x = np.log(t[sel])
    y = np.log(v[sel])
    res = stats.linregress(x, y)
    yhat = res.intercept + res.slope * x
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(float(res.slope), float(np.exp(res.intercept)), r2,
                       (lo, hi), float(res.stderr), float(res.intercept_stderr))


def trace_distance(a: CoinDensity, b: CoinDensity) -> float:
    """Half the trace norm of a - b.

    For 2x2 Hermitian unit-trace inputs the difference is traceless, so this
    equals half the Euclidean norm of the Bloch-vector difference.
    """
    dr = a.bloch() - b.bloch()
    return 0.5 * float(np.linalg.norm(dr))


@dataclass
class TraceDistanceSeries:
    """Trace distance between two evolving ensembles and its increments."""

    times: np.ndarray
    distance: np.ndarray
    velocity: np.ndarray  # velocity[t] = D(t+1) - D(t), length len(times) - 1

    @property
    def blp_sum(self) -> float:
        return float(np.sum(np.maximum(self.velocity, 0.0)))

    @property
    def positive_velocity_count(self) -> int:
        return int(np.sum(self.velocity > 0.0))

    def check(self, atol: float = 1e-10) -> None:
        if (self.distance < -atol).any() or (self.distance > 1 + atol).any():
            raise ValueError("trace distance left [0, 1]")
        dv = np.diff(self.distance) - self.velocity
        if np.abs(dv).max() > 1e-14:
            raise ValueError("velocities inconsistent with distance differences")


def trace_distance_experiment(coin_a: CoinBlochState, coin_b: CoinBlochState,
                              packet: GaussianPacketSpec, coin: CoinParams,
                              rule: StepSizeRule, T: int, N: int,
                              master_seed) -> TraceDistanceSeries:
    """Trace distance between the mean coin densities of two ensembles that
    differ only in the initial coin state.

    Trajectory i of both ensembles consumes the identical shift / jitter
    realisation (common-randomness pairing), so the distance converges to
    the channel-level value as N grows.
    """
    if T < 1 or N < 1:
        raise ValueError("T and N must be >= 1")
    init_a = make_gaussian_packet(packet, coin_a)
    init_b = make_gaussian_packet(packet, coin_b)
    snaps = np.arange(0, T + 1, dtype=np.int64)
    W = _buffer_capacity(init_a, rule, T)
    center = W // 2
    u = np.zeros(W, dtype=np.complex128)
    d = np.zeros(W, dtype=np.complex128)
    su = np.zeros_like(u)
    sd = np.zeros_like(d)
    dummy = np.zeros((1, 1))
    sums = np.zeros((2, T + 1, 3), dtype=np.complex128)
    mom = np.zeros((T + 1, 5))
    for i in range(N):
        rng = trajectory_stream(master_seed, i)
        deltas, thetas = draw_trajectory_randomness(rng, coin, rule, T)
        cos_t, sin_t = np.cos(thetas), np.sin(thetas)
        for which, init in ((0, init_a), (1, init_b)):
            lo, hi = _load_state(init, u, d, center)
            mom[:] = 0.0
            _kernels.snapshot_state(u, d, lo, hi, center, mom[0],
                                    sums[which, 0], dummy[0], False)
            flo, fhi = _kernels.evolve_walk(u, d, su, sd, lo, hi, center,
                                            deltas, cos_t, sin_t,
                                            snaps[1:], mom[1:], sums[which, 1:],
                                            dummy, False)
            u[flo:fhi + 1] = 0.0
            d[flo:fhi + 1] = 0.0
    D = np.empty(T + 1)
    for t in range(T + 1):
        dens = []
        for which in range(2):
            ruu, rdd, rud = sums[which, t] / N
            dens.append(CoinDensity(np.array([[ruu, rud], [np.conj(rud), rdd]])))
        D[t] = trace_distance(dens[0], dens[1])
    return TraceDistanceSeries(snaps, D, np.diff(D))


@dataclass
class GaussianityReport:
    excess_kurtosis: float
    sup_norm: float
    parity_restricted: bool


def gaussianity_check(dist: PositionDistribution, parity_mass_tol: float = 1e-12):
    """Excess kurtosis plus the sup-norm distance to the moment-matched
    Gaussian evaluated on the lattice.

    When the walk occupies a single parity class (the standard walk does),
    the comparison restricts to that class with the Gaussian values doubled;
    otherwise all sites are compared directly.
    """
    mean, var, kurt = moments(dist)
    if var <= 0:
        raise ValueError("gaussianity check requires positive variance")
    l = dist.sites().astype(float)
    p = dist.probs / dist.probs.sum()
    parity = dist.sites() % 2
    mass_even = float(p[parity == 0].sum())
    mass_odd = float(p[parity == 1].sum())
    restricted = min(mass_even, mass_odd) < parity_mass_tol
    gauss = np.exp(-((l - mean) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var)
    if restricted:
        keep = parity == (0 if mass_even > mass_odd else 1)
        sup = float(np.abs(p[keep] - 2.0 * gauss[keep]).max())
    else:
        sup = float(np.abs(p - gauss).max())
    return GaussianityReport(kurt, sup, restricted)
