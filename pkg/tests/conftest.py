import numpy as np
import pytest


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)


def dist_moments(dist):
    """Independent moment computation used as an oracle in several tests."""
    l = dist.sites().astype(float)
    p = np.asarray(dist.probs, dtype=float)
    m = float((l * p).sum())
    v = float(((l - m) ** 2 * p).sum())
    return m, v


def align(dist_a, dist_b):
    """Embed two lattice distributions on a common window."""
    lo = min(dist_a.window_lo, dist_b.window_lo)
    hi = max(dist_a.window_lo + dist_a.probs.size,
             dist_b.window_lo + dist_b.probs.size)
    a = np.zeros(hi - lo)
    b = np.zeros(hi - lo)
    a[dist_a.window_lo - lo:dist_a.window_lo - lo + dist_a.probs.size] = dist_a.probs
    b[dist_b.window_lo - lo:dist_b.window_lo - lo + dist_b.probs.size] = dist_b.probs
    return a, b
