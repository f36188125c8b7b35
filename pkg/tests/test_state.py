import numpy as np
import pytest

from eqwalk import (CoinBlochState, CoinDensity, GaussianPacketSpec,
                    make_gaussian_packet, make_localized,
                    position_distribution, reduced_coin_density)


def test_localized_north_pole():
    st = make_localized(0, CoinBlochState(0.0, 0.0))
    assert st.amp_up[0] == pytest.approx(1.0)
    assert st.amp_down[0] == pytest.approx(0.0)
    st.check()


def test_localized_south_pole():
    st = make_localized(0, CoinBlochState(np.pi, 0.0))
    assert abs(st.amp_up[0]) == pytest.approx(0.0, abs=1e-15)
    assert abs(st.amp_down[0]) == pytest.approx(1.0)


def test_localized_equal_superposition():
    st = make_localized(0, CoinBlochState(np.pi / 2, 0.0))
    assert st.amp_up[0] == pytest.approx(1 / np.sqrt(2))
    assert st.amp_down[0] == pytest.approx(1 / np.sqrt(2))


def test_packet_delta_limit_is_point_source():
    st = make_gaussian_packet(GaussianPacketSpec(0, 1e6), CoinBlochState(0, 0))
    pd = position_distribution(st)
    assert pd.prob_at(0) > 1 - 1e-9


def test_packet_width_oracle():
    # direct summation of the envelope: std of |amp|^2 is sqrt(1/(2 delta))
    spec = GaussianPacketSpec(0, 0.001)
    st = make_gaussian_packet(spec, CoinBlochState(np.pi / 2, 0.0))
    pd = position_distribution(st)
    l = pd.sites().astype(float)
    mean = (l * pd.probs).sum()
    std = np.sqrt(((l - mean) ** 2 * pd.probs).sum())
    assert abs(std - np.sqrt(1 / (2 * 0.001))) / std < 0.01


@pytest.mark.parametrize("delta", [1e-3, 0.05, 1.0, 1e6])
def test_packet_unit_norm(delta):
    st = make_gaussian_packet(GaussianPacketSpec(0, delta), CoinBlochState(1.0, 2.0))
    assert abs(st.norm_sq() - 1.0) < 1e-12


def test_packet_rejects_bad_delta():
    with pytest.raises(ValueError):
        GaussianPacketSpec(0, 0.0)
    with pytest.raises(ValueError):
        GaussianPacketSpec(0, -1.0)


def test_position_distribution_localized():
    pd = position_distribution(make_localized(0, CoinBlochState(0, 0)))
    assert pd.prob_at(0) == pytest.approx(1.0)
    pd.check()


def test_position_marginal_ignores_coin():
    pd = position_distribution(make_localized(0, CoinBlochState(np.pi / 2, 1.3)))
    assert pd.prob_at(0) == pytest.approx(1.0)


def test_position_distribution_global_phase_invariant():
    st = make_localized(0, CoinBlochState(1.1, 0.4))
    st2 = st.copy()
    st2.amp_up *= np.exp(0.77j)
    st2.amp_down *= np.exp(0.77j)
    a = position_distribution(st).probs
    b = position_distribution(st2).probs
    assert np.abs(a - b).max() < 1e-15


def test_reduced_density_up():
    rho = reduced_coin_density(make_localized(0, CoinBlochState(0, 0)))
    assert np.allclose(rho.matrix, np.diag([1, 0]))
    assert np.allclose(rho.bloch(), [0, 0, 1])


def test_reduced_density_plus():
    rho = reduced_coin_density(make_localized(0, CoinBlochState(np.pi / 2, 0)))
    assert np.allclose(rho.matrix, np.full((2, 2), 0.5))
    assert np.allclose(rho.bloch(), [1, 0, 0])


def test_reduced_density_disjoint_supports():
    from eqwalk import WalkState
    st = WalkState(0, np.array([1, 0]) / np.sqrt(2), np.array([0, 1]) / np.sqrt(2))
    rho = reduced_coin_density(st)
    assert rho.matrix[0, 1] == 0 and rho.matrix[1, 0] == 0
    rho.check()


def test_bloch_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(50):
        v = rng.normal(size=3)
        v *= rng.random() / np.linalg.norm(v)
        rho = CoinDensity.from_bloch(v)
        rho.check()
        rho2 = CoinDensity.from_bloch(rho.bloch())
        assert np.abs(rho.matrix - rho2.matrix).max() < 1e-14


def test_density_validation_rejects_bad():
    with pytest.raises(ValueError):
        CoinDensity(np.array([[1.0, 0.5], [0.4, 0.0]])).check()  # not hermitian
    with pytest.raises(ValueError):
        CoinDensity(np.diag([0.8, 0.8])).check()  # trace != 1
    with pytest.raises(ValueError):
        CoinDensity(np.diag([1.5, -0.5])).check()  # negative eigenvalue


def test_trimmed_keeps_amplitudes():
    st = make_gaussian_packet(GaussianPacketSpec(0, 0.5), CoinBlochState(0.2, 0))
    from eqwalk import apply_shift
    grown = apply_shift(st, 4)
    tr = grown.trimmed()
    assert tr.norm_sq() == pytest.approx(1.0, abs=1e-12)
    assert tr.amp_up.size <= grown.amp_up.size
