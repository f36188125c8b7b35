"""Pure walker states on a one-dimensional lattice with a two-level coin.

A state is a pair of complex amplitude arrays (spin-up / spin-down) over a
bounded window of lattice sites; sites outside the window carry amplitude
zero.  The module provides constructors (point source, Gaussian packet),
the position marginal and the reduced 2x2 coin density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NORM_ATOL = 1e-12

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


@dataclass
class CoinBlochState:
    """Pure coin state (cos(gamma/2), e^{-i phi} sin(gamma/2)) on the Bloch sphere."""

    gamma: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.gamma <= np.pi:
            raise ValueError(f"gamma must lie in [0, pi], got {self.gamma}")

    def spinor(self) -> np.ndarray:
        return np.array([np.cos(self.gamma / 2),
                         np.exp(-1j * self.phi) * np.sin(self.gamma / 2)])


@dataclass
class GaussianPacketSpec:
    """Gaussian envelope exp(-delta l^2 / 2) around ``center``.

    ``delta`` is the coefficient in the amplitude envelope, so the

    |amplitude|^2 profile has position variance 1/(2 delta).
    """

    center: int = 0
    delta: float = 1.0

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")

    def sigma(self) -> float:
        """Position standard deviation of the |amplitude|^2 profile."""
        return 1.0 / np.sqrt(2.0 * self.delta)


@dataclass
class WalkState:
    """Two spin-resolved amplitude arrays over the window starting at ``window_lo``."""

    window_lo: int
    amp_up: np.ndarray
    amp_down: np.ndarray
    time: int = 0

    def __post_init__(self):
        self.amp_up = np.asarray(self.amp_up, dtype=complex)
        self.amp_down = np.asarray(self.amp_down, dtype=complex)
        if self.amp_up.shape != self.amp_down.shape or self.amp_up.ndim != 1:
            raise ValueError("amp_up and amp_down must be 1-d arrays of equal length")
        if self.amp_up.size < 1:
            raise ValueError("window must contain at least one site")

    @property
    def window_hi(self) -> int:
        return self.window_lo + self.amp_up.size - 1

    def sites(self) -> np.ndarray:
        return np.arange(self.window_lo, self.window_lo + self.amp_up.size)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amp_up) ** 2 + np.abs(self.amp_down) ** 2))

    def check(self, atol: float = NORM_ATOL) -> None:
        if abs(self.norm_sq() - 1.0) > atol:
            raise ValueError(f"state norm^2 deviates from 1 by {self.norm_sq() - 1.0:.3e}")

    def copy(self) -> "WalkState":
        return WalkState(self.window_lo, self.amp_up.copy(), self.amp_down.copy(), self.time)

    def trimmed(self, eps: float = 0.0) -> "WalkState":
        """Shrink the window to the occupied span (amplitudes above ``eps``)."""
        occ = (np.abs(self.amp_up) > eps) | (np.abs(self.amp_down) > eps)
        if not occ.any():
            return self
        i0, i1 = np.flatnonzero(occ)[[0, -1]]
        return WalkState(self.window_lo + int(i0),
                         self.amp_up[i0:i1 + 1].copy(),
                         self.amp_down[i0:i1 + 1].copy(),
                         self.time)


@dataclass
class PositionDistribution:
    """Normalised probabilities over the lattice window starting at ``window_lo``."""

    window_lo: int
    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)

    def sites(self) -> np.ndarray:
        return np.arange(self.window_lo, self.window_lo + self.probs.size)

    def check(self, atol: float = 1e-10) -> None:
        if (self.probs < -atol).any():
            raise ValueError("negative probability entry")
        if abs(self.probs.sum() - 1.0) > atol:
            raise ValueError(f"probabilities sum to {self.probs.sum()!r}, not 1")

    def prob_at(self, site: int) -> float:
        i = site - self.window_lo
        if 0 <= i < self.probs.size:
            return float(self.probs[i])
        return 0.0


@dataclass
class CoinDensity:
    """Reduced 2x2 coin density matrix, equivalently a real Bloch 3-vector."""

    matrix: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex) / 2)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex).reshape(2, 2)

    @classmethod
    def from_bloch(cls, r: np.ndarray) -> "CoinDensity":
        r = np.asarray(r, dtype=float)
        m = 0.5 * (np.eye(2, dtype=complex)
                   + r[0] * PAULI[0] + r[1] * PAULI[1] + r[2] * PAULI[2])
        return cls(m)

    def bloch(self) -> np.ndarray:
        """Bloch components r_i = Tr(rho sigma_i), real by hermiticity."""
        return np.array([np.trace(self.matrix @ PAULI[i]).real for i in range(3)])

    def check(self, atol: float = NORM_ATOL) -> None:
        m = self.matrix
        if np.abs(m - m.conj().T).max() > atol:
            raise ValueError("coin density is not Hermitian")
        if abs(np.trace(m).real - 1.0) > atol or abs(np.trace(m).imag) > atol:
            raise ValueError("coin density trace is not 1")
        ev = np.linalg.eigvalsh(m)
        if ev.min() < -atol:
            raise ValueError(f"coin density not positive semidefinite (min ev {ev.min():.3e})")
        if np.linalg.norm(self.bloch()) > 1.0 + atol:
            raise ValueError("Bloch vector leaves the unit ball")


def make_localized(l0: int, coin: CoinBlochState) -> WalkState:
    """Point source at site ``l0`` with the given coin spinor."""
    s = coin.spinor()
    return WalkState(l0, np.array([s[0]]), np.array([s[1]]), 0)


def make_gaussian_packet(spec: GaussianPacketSpec, coin: CoinBlochState,
                         truncation: float = 6.0) -> WalkState:
    """Gaussian amplitude envelope times the coin spinor, renormalised.

    The window covers ``truncation`` standard deviations of the
    |amplitude|^2 profile on each side of the center (at least one site).
    """
    if truncation <= 0:
        raise ValueError("truncation must be positive")
    half = max(1, int(np.ceil(truncation * spec.sigma())))
    l = np.arange(-half, half + 1)
    env = np.exp(-spec.delta * l.astype(float) ** 2 / 2.0)
    env /= np.sqrt(np.sum(env ** 2))
    s = coin.spinor()
    return WalkState(spec.center - half, env * s[0], env * s[1], 0)


def position_distribution(state: WalkState) -> PositionDistribution:
    """Position marginal P(l) = |psi_up(l)|^2 + |psi_down(l)|^2."""
    p = np.abs(state.amp_up) ** 2 + np.abs(state.amp_down) ** 2
    return PositionDistribution(state.window_lo, p)


def reduced_coin_density(state: WalkState) -> CoinDensity:
    """Trace out position: rho_ab = sum_l psi_a(l) conj(psi_b(l))."""
    u, d = state.amp_up, state.amp_down
    ud = np.sum(u * d.conj())
    m = np.array([[np.sum(np.abs(u) ** 2), ud],
                  [ud.conjugate(), np.sum(np.abs(d) ** 2)]])
    return CoinDensity(m)
