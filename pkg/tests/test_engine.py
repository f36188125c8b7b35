import numpy as np
import pytest

from eqwalk import (CoinBlochState, CoinParams, StepSizeRule, apply_coin,
                    apply_shift, conditional_step_distribution, make_localized,
                    position_distribution, run_ensemble, run_trajectory,
                    sample_coin_noise, sample_step_size, step_elephant,
                    step_standard, trajectory_stream)
from conftest import align, dist_moments

PI = np.pi


# ---------------------------------------------------------------- coin/shift

def test_coin_theta_zero_identity():
    st = make_localized(0, CoinBlochState(1.0, 0.7))
    out = apply_coin(st, 0.0)
    assert np.allclose(out.amp_up, st.amp_up) and np.allclose(out.amp_down, st.amp_down)


def test_coin_theta_half_pi():
    st = make_localized(0, CoinBlochState(0, 0))
    out = apply_coin(st, PI / 2)
    assert out.amp_up[0] == pytest.approx(0, abs=1e-15)
    assert out.amp_down[0] == pytest.approx(1j)


def test_coin_theta_quarter_pi():
    st = make_localized(0, CoinBlochState(0, 0))
    out = apply_coin(st, PI / 4)
    assert out.amp_up[0] == pytest.approx(1 / np.sqrt(2))
    assert out.amp_down[0] == pytest.approx(1j / np.sqrt(2))


def test_coin_preserves_norm():
    rng = np.random.default_rng(0)
    for _ in range(20):
        amp = rng.normal(size=(2, 7)) + 1j * rng.normal(size=(2, 7))
        amp /= np.sqrt((np.abs(amp) ** 2).sum())
        from eqwalk import WalkState
        st = WalkState(-3, amp[0], amp[1])
        out = apply_coin(st, rng.uniform(0, PI))
        assert abs(out.norm_sq() - 1) < 1e-14


def test_shift_zero_identity():
    st = make_localized(2, CoinBlochState(1.0, 0.0))
    out = apply_shift(st, 0)
    assert out.window_lo == st.window_lo
    assert np.allclose(out.amp_up, st.amp_up)


def test_shift_moves_components_oppositely():
    st = make_localized(0, CoinBlochState(PI / 2, 0))
    out = apply_shift(st, 1)
    pd_up = np.abs(out.amp_up) ** 2
    pd_dn = np.abs(out.amp_down) ** 2
    sites = out.sites()
    assert sites[np.argmax(pd_up)] == 1
    assert sites[np.argmax(pd_dn)] == -1


def test_shift_negative_swaps_roles():
    st = make_localized(0, CoinBlochState(PI / 3, 0.2))
    a = apply_shift(st, -3)
    b = apply_shift(st, 3)

    def image_site(state, comp):
        amp = state.amp_up if comp == "up" else state.amp_down
        return state.sites()[np.argmax(np.abs(amp))]

    # the up and down image positions exchange signs between +3 and -3
    assert image_site(a, "up") == -image_site(b, "up") == -3
    assert image_site(a, "down") == -image_site(b, "down") == 3


# ------------------------------------------------------------ standard steps

def test_one_standard_step_splits_evenly():
    st = make_localized(0, CoinBlochState(0, 0))
    out = step_standard(st, CoinParams(PI / 4))
    pd = position_distribution(out)
    assert pd.prob_at(1) == pytest.approx(0.5)
    assert pd.prob_at(-1) == pytest.approx(0.5)


def test_two_standard_steps_oracle():
    # hand amplitude multiplication for theta = pi/4 from |up>
    st = make_localized(0, CoinBlochState(0, 0))
    coin = CoinParams(PI / 4)
    out = step_standard(step_standard(st, coin), coin)
    pd = position_distribution(out)
    assert pd.prob_at(2) == pytest.approx(0.25)
    assert pd.prob_at(0) == pytest.approx(0.5)
    assert pd.prob_at(-2) == pytest.approx(0.25)


def test_identity_coin_ballistic():
    st = make_localized(0, CoinBlochState(0, 0))
    coin = CoinParams(0.0)
    for _ in range(7):
        st = step_standard(st, coin)
    pd = position_distribution(st)
    assert pd.prob_at(7) == pytest.approx(1.0)


# ------------------------------------------------------------------ sampling

def test_sample_step_size_unit():
    rule = StepSizeRule.unit()
    rng = np.random.default_rng(0)
    assert all(sample_step_size(rule, t, rng) == 1 for t in (1, 5, 100))


def test_sample_step_size_interval_support_t1():
    rule = StepSizeRule.interval()
    rng = np.random.default_rng(1)
    draws = {sample_step_size(rule, 1, rng) for _ in range(300)}
    assert draws == {0, 1, 2}


def test_sample_step_size_interval_chisquare_t3():
    from scipy import stats
    rule = StepSizeRule.interval()
    rng = np.random.default_rng(7)
    n = 100_000
    draws = np.array([sample_step_size(rule, 3, rng) for _ in range(n)])
    values, counts = np.unique(draws, return_counts=True)
    assert values.tolist() == list(range(-2, 5))
    # each frequency within 4 sigma of 1/7
    p = 1 / 7
    sigma = np.sqrt(p * (1 - p) / n)
    assert np.abs(counts / n - p).max() < 4 * sigma
    chi2 = ((counts - n * p) ** 2 / (n * p)).sum()
    assert chi2 < stats.chi2.ppf(0.9999, df=6)


def test_noise_sampler_moments():
    rng = np.random.default_rng(11)
    theta, eps = 0.6, 0.1
    xs = np.array([sample_coin_noise(theta, eps, rng) for _ in range(100_000)])
    se_mean = eps / np.sqrt(3) / np.sqrt(xs.size)
    assert abs(xs.mean() - theta) < 4 * se_mean
    var = eps ** 2 / 3
    se_var = var * np.sqrt(2 / xs.size) * 1.5
    assert abs(xs.var() - var) < 4 * se_var
    assert sample_coin_noise(theta, 0.0, rng) == theta


# ------------------------------------------------------------- elephant step

def test_elephant_delta_one_equals_standard():
    st = make_localized(0, CoinBlochState(0.9, 0.3))
    coin = CoinParams(PI / 5)
    a = step_standard(st, coin)
    b = step_elephant(st, coin, 1)
    assert np.abs(a.amp_up - b.amp_up).max() < 1e-15
    assert np.abs(a.amp_down - b.amp_down).max() < 1e-15


def test_elephant_delta_zero_keeps_marginal():
    st = make_localized(0, CoinBlochState(0.4, 0))
    out = step_elephant(st, CoinParams(PI / 4), 0)
    pd = position_distribution(out)
    assert pd.prob_at(0) == pytest.approx(1.0)


def test_elephant_delta_two_oracle():
    st = make_localized(0, CoinBlochState(0, 0))
    pd = position_distribution(step_elephant(st, CoinParams(PI / 4), 2))
    assert pd.prob_at(2) == pytest.approx(0.5)
    assert pd.prob_at(-2) == pytest.approx(0.5)


# ---------------------------------------------------------------- trajectory

def test_trajectory_unit_rule_ignores_seed():
    init = make_localized(0, CoinBlochState(PI / 2, 0))
    coin = CoinParams(PI / 4)
    rule = StepSizeRule.unit()
    a = run_trajectory(init, coin, rule, 20, [20], seed=1)
    b = run_trajectory(init, coin, rule, 20, [20], seed=999)
    xa, xb = align(a.distributions[0], b.distributions[0])
    assert np.abs(xa - xb).max() == 0.0


def test_trajectory_deterministic():
    init = make_localized(0, CoinBlochState(PI / 2, 0))
    coin = CoinParams(PI / 4, noise_epsilon=0.05)
    rule = StepSizeRule.interval()
    a = run_trajectory(init, coin, rule, 15, [7, 15], seed=42)
    b = run_trajectory(init, coin, rule, 15, [7, 15], seed=42)
    assert np.array_equal(a.deltas, b.deltas)
    for da, db in zip(a.distributions, b.distributions):
        assert da.window_lo == db.window_lo
        assert np.array_equal(da.probs, db.probs)


def test_trajectory_replay_oracle():
    # recorded deltas match an independent replay of the seeded sampler
    rule = StepSizeRule.interval()
    coin = CoinParams(PI / 4)
    init = make_localized(0, CoinBlochState(PI / 2, 0))
    rec = run_trajectory(init, coin, rule, 2, [2], seed=31)
    rng = np.random.default_rng(np.random.SeedSequence(31))
    expect = [sample_step_size(rule, t, rng) for t in (1, 2)]
    assert rec.deltas.tolist() == expect


def test_trajectory_matches_public_op_composition():
    init = make_localized(0, CoinBlochState(PI / 2, 0))
    coin = CoinParams(PI / 3, noise_epsilon=0.2)
    rule = StepSizeRule.interval()
    T = 10
    rec = run_trajectory(init, coin, rule, T, [T], seed=5)
    rng = np.random.default_rng(np.random.SeedSequence(5))
    st = init
    for t in range(1, T + 1):
        dl = sample_step_size(rule, t, rng)
        th = sample_coin_noise(coin.theta, coin.noise_epsilon, rng)
        st = step_elephant(st, coin, dl, th)
    pa, pb = align(position_distribution(st.trimmed()), rec.distributions[0])
    assert np.abs(pa - pb).max() < 1e-13


def test_trajectory_rejects_bad_snapshots():
    init = make_localized(0, CoinBlochState(0, 0))
    with pytest.raises(ValueError):
        run_trajectory(init, CoinParams(1.0), StepSizeRule.unit(), 5, [], seed=0)
    with pytest.raises(ValueError):
        run_trajectory(init, CoinParams(1.0), StepSizeRule.unit(), 5, [6], seed=0)


def test_standard_walk_parity_support():
    init = make_localized(0, CoinBlochState(PI / 2, 0))
    rec = run_trajectory(init, CoinParams(PI / 4), StepSizeRule.unit(), 9, [9], seed=0)
    pd = rec.distributions[0]
    odd_sites = pd.sites() % 2 == 1
    assert pd.probs[~odd_sites].max() < 1e-30


def test_standard_walk_reflection_symmetry():
    # gamma = pi/2 with phi = 0 is the reflection-symmetric coin for this
    # coin convention (phi = pi/2 gives a maximally biased first step)
    init = make_localized(0, CoinBlochState(PI / 2, 0.0))
    rec = run_trajectory(init, CoinParams(PI / 4), StepSizeRule.unit(), 40, [40], seed=0)
    p = rec.distributions[0].probs
    assert np.abs(p - p[::-1]).max() < 1e-12


def test_unitarity_thousand_steps():
    init = make_localized(0, CoinBlochState(PI / 2, 0))
    rec = run_trajectory(init, CoinParams(PI / 4), StepSizeRule.interval(),
                         1000, [1000], seed=8)
    assert abs(rec.moments[0, 0] - 1.0) < 1e-10


# ------------------------------------------------------------------ ensemble

def test_ensemble_n1_reduces_to_trajectory():
    init = make_localized(0, CoinBlochState(PI / 2, 0))
    coin = CoinParams(PI / 4)
    rule = StepSizeRule.interval()
    ens = run_ensemble(init, coin, rule, 8, [4, 8], N=1, master_seed=17)
    rec = run_trajectory(init, coin, rule, 8, [4, 8],
                         seed=np.random.SeedSequence(17, spawn_key=(0,)))
    for de, dt in zip(ens.mean_distributions, rec.distributions):
        a, b = align(de, dt)
        assert np.abs(a - b).max() < 1e-15


def test_ensemble_deterministic_and_thread_invariant():
    init = make_localized(0, CoinBlochState(PI / 2, 0))
    coin = CoinParams(PI / 4)
    rule = StepSizeRule.interval()
    kw = dict(T=6, snapshots=[6], N=40, master_seed=3)
    a = run_ensemble(init, coin, rule, **kw, threads=1)
    b = run_ensemble(init, coin, rule, **kw, threads=1)
    assert np.array_equal(a.variance, b.variance)
    assert np.array_equal(a.mean_distributions[0].probs, b.mean_distributions[0].probs)


def test_ensemble_prefix_subset_equivalence():
    # the first N trajectories of a larger run are exactly an N-run
    init = make_localized(0, CoinBlochState(PI / 2, 0))
    coin = CoinParams(PI / 4)
    rule = StepSizeRule.interval()
    big = run_ensemble(init, coin, rule, 6, [6], N=30, master_seed=9, keep_samples=True)
    small = run_ensemble(init, coin, rule, 6, [6], N=10, master_seed=9, keep_samples=True)
    assert np.array_equal(big.moment2_samples[:10], small.moment2_samples)


def test_ensemble_se_scaling(rng):
    init = make_localized(0, CoinBlochState(PI / 2, 0))
    coin = CoinParams(PI / 4)
    rule = StepSizeRule.interval()
    a = run_ensemble(init, coin, rule, 10, [10], N=200, master_seed=1)
    b = run_ensemble(init, coin, rule, 10, [10], N=800, master_seed=1)
    ratio = a.se_var[0] / b.se_var[0]
    assert 1.6 < ratio < 2.6  # ~2 from the 1/sqrt(N) law


def test_ensemble_unit_rule_equals_exact_walk():
    init = make_localized(0, CoinBlochState(PI / 2, 0))
    coin = CoinParams(PI / 4)
    snaps = [5, 10, 20]
    ens = run_ensemble(init, coin, StepSizeRule.unit(), 20, snaps, N=3, master_seed=1)
    rec = run_trajectory(init, coin, StepSizeRule.unit(), 20, snaps, seed=0)
    for k in range(len(snaps)):
        m, v = dist_moments(rec.distributions[k])
        assert ens.variance[k] == pytest.approx(v, abs=1e-12)
        assert ens.se_var[k] == pytest.approx(0.0, abs=1e-12)


def test_ensemble_thread_count_invariant():
    # block-ordered merging makes the result independent of the worker pool
    init = make_localized(0, CoinBlochState(PI / 2, 0))
    coin = CoinParams(PI / 4)
    rule = StepSizeRule.interval()
    # N > 512 so the run spans two blocks and actually engages the pool
    a = run_ensemble(init, coin, rule, 5, [5], N=600, master_seed=13, threads=1)
    b = run_ensemble(init, coin, rule, 5, [5], N=600, master_seed=13, threads=2)
    assert np.array_equal(a.variance, b.variance)
    assert np.array_equal(a.mean_distributions[0].probs, b.mean_distributions[0].probs)


def test_ensemble_mean_distribution_normalised():
    init = make_localized(0, CoinBlochState(PI / 2, 0))
    ens = run_ensemble(init, CoinParams(PI / 4), StepSizeRule.interval(),
                       12, [12], N=25, master_seed=2)
    assert abs(ens.mean_distributions[0].probs.sum() - 1) < 1e-9
    ens.mean_coin_densities[0].check(atol=1e-9)


# ------------------------------------------------- collapse conditional laws

def test_conditional_first_step_marginal_formula():
    # P(step1 = +1) = (1 + m)/2 with m = cos(g) cos(2 th) + sin(g) sin(2 th) sin(ph)
    for theta, g, ph in [(PI / 4, 0.0, 0.0), (PI / 6, 1.0, 2.0), (PI / 3, 2.2, 4.0)]:
        tab = conditional_step_distribution(CoinParams(theta), CoinBlochState(g, ph),
                                            t=2, N=200_000, seed=10)
        m = np.cos(g) * np.cos(2 * theta) + np.sin(g) * np.sin(2 * theta) * np.sin(ph)
        p, se = tab.conditional(1, ())
        assert abs(p - (1 + m) / 2) < 3.5 * max(se, 1e-4)


def test_conditional_second_step_is_half_at_quarter_pi():
    tab = conditional_step_distribution(CoinParams(PI / 4), CoinBlochState(0, 0),
                                        t=2, N=200_000, seed=11)
    p, se = tab.conditional(2, (1,))
    assert abs(p - 0.5) < 3.5 * se


def test_conditional_identity_coin_never_flips():
    tab = conditional_step_distribution(CoinParams(0.0), CoinBlochState(0, 0),
                                        t=2, N=10_000, seed=12)
    p, _ = tab.conditional(2, (1,))
    assert p == 1.0


def test_conditional_tables_normalised():
    tab = conditional_step_distribution(CoinParams(PI / 5), CoinBlochState(0.7, 0.2),
                                        t=3, N=50_000, seed=13)
    assert tab.joint.sum() == pytest.approx(1.0, abs=1e-12)
    for prefix in [(), (1,), (-1,)]:
        p, _ = tab.conditional(len(prefix) + 1, prefix)
        q, _ = tab.conditional(len(prefix) + 1, prefix)
        assert 0 <= p <= 1 and p == q


def test_conditional_rejects_out_of_scope():
    with pytest.raises(ValueError):
        conditional_step_distribution(CoinParams(1.0), CoinBlochState(0, 0),
                                      t=4, N=10, seed=0)
    with pytest.raises(ValueError):
        conditional_step_distribution(CoinParams(1.0, 0.1), CoinBlochState(0, 0),
                                      t=2, N=10, seed=0)
