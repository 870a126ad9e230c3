import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from urllc_evt.errors import DomainError, InfeasibleChannel
from urllc_evt.link import (
    AllocationRequest,
    achieved_error_probability,
    bits_delivered,
    blocklength,
    capacity,
    dispersion,
    q_func,
    q_inv,
    required_blocklength,
    sinr_from_inr,
)


def test_q_inv_values():
    assert q_inv(0.5) == pytest.approx(0.0, abs=1e-15)
    assert q_inv(1e-7) == pytest.approx(5.1993375821928165, rel=1e-12)
    for p in np.logspace(-12, np.log10(0.99), 100):
        assert q_func(q_inv(p)) == pytest.approx(p, rel=1e-10)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_q_inv_domain(p):
    with pytest.raises(DomainError):
        q_inv(p)


def test_capacity_dispersion_values():
    assert capacity(0.0) == 0.0 and dispersion(0.0) == 0.0
    assert capacity(1.0) == pytest.approx(1.0)
    assert dispersion(1.0) == pytest.approx(0.75 * np.log2(np.e) ** 2)
    assert capacity(100.0) == pytest.approx(6.658211482751795, rel=1e-12)
    assert dispersion(100.0) == pytest.approx(2.081164945226664, rel=1e-12)


def test_blocklength_reference_point():
    # root of the forward approximation found by a bracketing solver
    ref = brentq(lambda m: bits_delivered(m, 1e-5, 100.0) - 50, 1.0, 100.0, xtol=1e-14)
    M = blocklength(50, 1e-5, 100.0)
    assert M == pytest.approx(ref, rel=1e-10)
    assert M == pytest.approx(10.50448351521, rel=1e-10)
    d = required_blocklength(AllocationRequest(50, 1e-5), 100.0)
    assert d.blocklength == 11 and not d.capped


def test_half_outage_is_shannon_rate():
    for g in (0.1, 1.0, 30.0):
        d = required_blocklength(AllocationRequest(100, 0.5), g)
        assert d.blocklength == int(np.ceil(100 / capacity(g) - 1e-9))


def test_cap_applies():
    d = required_blocklength(AllocationRequest(500, 1e-7, max_blocklength=64), 0.01)
    assert d.capped and d.blocklength == 64
    assert blocklength(500, 1e-7, 0.01, max_blocklength=64) == 64


def test_inverse_residual_random(rng):
    for _ in range(200):
        b = int(rng.integers(8, 2000))
        eps = 10 ** rng.uniform(-9, -1)
        g = 10 ** rng.uniform(-2, 3)
        M = blocklength(b, eps, g)
        assert abs(bits_delivered(M, eps, g) - b) <= 1.0


@settings(max_examples=60)
@given(st.integers(1, 5000), st.floats(1e-9, 0.5), st.floats(1e-3, 1e4), st.floats(1.01, 10))
def test_blocklength_monotone(b, eps, g, k):
    M = blocklength(b, eps, g)
    assert blocklength(b, eps, g * k) <= M * (1 + 1e-12)
    assert blocklength(b + 1, eps, g) >= M
    assert blocklength(b, eps / k, g) >= M * (1 - 1e-12)


def test_achieved_error_examples():
    g = 100.0
    M = 50 / capacity(g)
    assert achieved_error_probability(M, 50, g) == pytest.approx(0.5)
    for eps in (1e-1, 1e-3, 1e-5, 1e-7):
        M = blocklength(50, eps, g)
        assert achieved_error_probability(M, 50, g) == pytest.approx(eps, rel=0.05)
    assert achieved_error_probability(10.0, 50, 0.0) == 1.0


def test_achieved_error_decreasing_in_sinr():
    gs = np.logspace(0, 1.5, 50)
    p = achieved_error_probability(20.0, 50, gs)
    assert np.all((p > 0) & (p < 1))
    assert np.all(np.diff(p) < 0)
    wide = achieved_error_probability(40.0, 50, np.logspace(-1, 3, 50))
    assert np.all(np.diff(wide) <= 0)


def test_sinr_examples():
    assert sinr_from_inr(100.0, 0.0) == pytest.approx(100.0)
    assert sinr_from_inr(100.0, 1.0) == pytest.approx(50.0)
    np.testing.assert_allclose(sinr_from_inr(100.0, np.array([0.0, 3.0])), [100.0, 25.0])


def test_infeasible_channel():
    with pytest.raises(InfeasibleChannel):
        blocklength(50, 1e-5, 0.0)
    with pytest.raises(InfeasibleChannel):
        required_blocklength(AllocationRequest(50, 1e-5), -1.0)


def test_request_validation():
    with pytest.raises(ValueError):
        AllocationRequest(0, 1e-5)
    with pytest.raises(ValueError):
        AllocationRequest(50, 0.7)
