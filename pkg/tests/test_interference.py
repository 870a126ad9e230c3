import numpy as np
import pytest
from scipy import stats

from urllc_evt.errors import NonPositiveValue
from urllc_evt.interference import (
    InterferenceGenerator,
    InterferenceTrace,
    SimConfig,
    db_to_linear,
    duty_cycle,
    generate_trace,
    linear_to_db,
)


def simulate_on_off(mu, zeta, n, seed):
    """Slot-by-slot reference chain: an idle slot starts a message next slot w.p. mu."""
    rng = np.random.default_rng(seed)
    remaining, on = 0, 0
    for _ in range(n):
        if remaining > 0:
            on += 1
            remaining -= 1
        elif rng.random() < mu:
            remaining = zeta
    return on / n


def test_db_conversions():
    assert db_to_linear(0) == 1.0
    assert db_to_linear(20) == pytest.approx(100.0, rel=1e-15)
    assert linear_to_db(db_to_linear(-7.3)) == pytest.approx(-7.3, rel=1e-12)
    np.testing.assert_allclose(linear_to_db(db_to_linear(np.linspace(-30, 30, 61))),
                               np.linspace(-30, 30, 61), rtol=1e-12, atol=1e-12)
    with pytest.raises(NonPositiveValue):
        linear_to_db(0.0)


def test_duty_cycle_trivial():
    assert duty_cycle(1.0, 10) == pytest.approx(10 / 11)
    assert duty_cycle(0.0, 10) == 0.0


def test_duty_cycle_matches_reference_chain():
    assert duty_cycle(0.4, 10) == pytest.approx(0.8)
    assert simulate_on_off(0.4, 10, 1_000_000, seed=3) == pytest.approx(0.8, abs=0.01)


def run_lengths(a):
    change = np.flatnonzero(np.diff(a.astype(int))) + 1
    starts = np.r_[0, change]
    return np.diff(np.r_[starts, len(a)]), a[starts]


def test_generator_activity_matches_duty_cycle():
    gen = InterferenceGenerator(SimConfig(num_interferers=1, activation_factor=0.4, seed=5))
    # odd block sizes exercise the carry-over of partial messages between blocks
    active = np.concatenate([gen._activity(gen.states[0], n) for n in (1, 7, 10, 333, 999_659)])
    assert active.mean() == pytest.approx(0.8, abs=0.01)
    lengths, values = run_lengths(active)
    inner_lengths, inner_values = lengths[1:-1], values[1:-1]
    assert set(inner_lengths[inner_values]) == {10}
    assert inner_lengths[~inner_values].mean() == pytest.approx(1 / 0.4, rel=0.02)


def test_zero_activation_gives_silent_trace():
    tr = generate_trace(SimConfig(activation_factor=0.0, seed=1), 5000)
    assert np.all(tr.values == 0)


def test_full_activation_single_interferer():
    cfg = SimConfig(num_interferers=1, activation_factor=1.0, message_duration=10, seed=9)
    gen = InterferenceGenerator(cfg)
    x = gen.next_block(1100).values
    on = x > 0
    # renewal with mean idle 1/mu = 1: period of 11 slots, one silent slot per period
    assert on.mean() == pytest.approx(10 / 11, abs=1e-9)
    idle = np.flatnonzero(~on)
    assert np.all(np.diff(idle) == 11)


def test_reproducible_and_seed_sensitive(base_config):
    a = generate_trace(base_config, 5000).values
    b = generate_trace(base_config, 5000).values
    c = generate_trace(base_config.with_(seed=base_config.seed + 1), 5000).values
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_blocks_continue_the_same_process():
    cfg = SimConfig(num_interferers=1, activation_factor=1.0, message_duration=10_000)
    last, first = [], []
    for seed in range(300):
        g = InterferenceGenerator(cfg.with_(seed=seed), warmup=False)
        g.states[0].remaining_message = 10_000
        last.append(g.next_block(50).values[-1])
        first.append(g.next_block(50).values[0])
    # fading is carried across the block boundary: adjacent slots correlate at ~0.98
    assert np.corrcoef(last, first)[0, 1] > 0.95


def test_mean_calibration(base_config):
    x = generate_trace(base_config, 1_000_000).values
    assert x.mean() == pytest.approx(db_to_linear(base_config.mean_inr_db), rel=0.03)


@pytest.mark.parametrize("mu", [0.4, 0.7, 1.0])
def test_mean_calibration_other_loads(mu):
    cfg = SimConfig(activation_factor=mu, mean_inr_db=-3.0, filter_length=10, seed=11)
    x = generate_trace(cfg, 400_000).values
    assert x.mean() == pytest.approx(db_to_linear(-3.0), rel=0.03)


def test_fading_marginal_is_unit_exponential():
    gen = InterferenceGenerator(SimConfig(num_interferers=1, filter_length=1, seed=4))
    power = gen._fading_power(gen.states[0], 100_000)
    assert stats.kstest(power, "expon").statistic < 0.01


def _autocorr(x, lags):
    x = x - x.mean()
    v = np.dot(x, x)
    return np.array([np.dot(x[: len(x) - k], x[k:]) / v for k in lags])


def test_fading_lag1_correlation_equal_tap_filter():
    """Equal-tap filter of length F gives |h| correlation (F-1)/F, power correlation its square."""
    gen = InterferenceGenerator(SimConfig(num_interferers=1, filter_length=100, seed=8))
    power = gen._fading_power(gen.states[0], 1_000_000)
    assert _autocorr(power, [1])[0] == pytest.approx(0.99**2, abs=0.005)


def test_fading_correlation_decreases_with_lag():
    lags = np.arange(0, 85, 5)
    acs = []
    for seed in range(20):
        gen = InterferenceGenerator(SimConfig(num_interferers=1, filter_length=100, seed=seed))
        acs.append(_autocorr(gen._fading_power(gen.states[0], 100_000), lags))
    ac = np.mean(acs, axis=0)
    assert np.all(np.diff(ac) <= 0)
    np.testing.assert_allclose(ac, ((100 - lags) / 100) ** 2, atol=0.03)


def test_trace_csv_roundtrip(tmp_path, base_config):
    tr = generate_trace(base_config, 50)
    p = tmp_path / "trace.csv"
    tr.to_csv(p)
    assert p.read_text().splitlines()[0] == "slot,inr_linear"
    assert np.array_equal(InterferenceTrace.from_csv(p).values, tr.values)


@pytest.mark.parametrize("kwargs", [
    {"num_interferers": 0}, {"activation_factor": 1.5}, {"message_duration": 0},
    {"filter_length": 0},
])
def test_config_invariants(kwargs):
    with pytest.raises(ValueError):
        SimConfig(**kwargs)
