"""Cost engine checks against longhand arithmetic.

The reference computations below are written out term by term, independently
of the vectorized module code, so the two can only agree if both follow the
same model.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from factories import build_instance, table2_instance

from edge3c.costs import (
    AffineCost,
    affine_decompose,
    case_cost,
    coefficient_arrays,
    cost_coefficients,
    expected_user_cost,
    full_band_rates,
    policy_costs,
    service_cost,
    spectral_efficiency,
    transmission_rate,
    user_delay_energy,
)
from edge3c.model import InputError


def reference_case(inst, u, i, rate, cached, local):
    """Longhand delay and energy for one service case."""
    dev = inst.devices[u]
    plain = inst.catalog.plain_size_bits
    stereo = float(inst.catalog.stereo_size_bits[i])
    cycles = plain * float(inst.catalog.cycles_per_bit[i])
    if cached and local:
        t = cycles / dev.cpu_cps
        return t, dev.comp_power_w * t
    if local:
        t_tx = plain / rate
        t_proc = cycles / dev.cpu_cps
        return t_tx + t_proc, dev.recv_power_w * t_tx + dev.comp_power_w * t_proc
    t_proc = cycles / inst.channel.edge_cps
    t_tx = stereo / rate
    return t_proc + t_tx, dev.idle_power_w * t_proc + dev.recv_power_w * t_tx


def test_spectral_efficiency_matches_shannon_formula():
    inst = build_instance()
    ch = inst.channel
    snr = ch.tx_psd_w_per_hz * float(ch.gains[0]) / ch.noise_psd_w_per_hz
    assert spectral_efficiency(ch, 0) == pytest.approx(math.log2(1.0 + snr), rel=1e-15)


def test_transmission_rate_table2_defaults():
    # 30 MHz, 0.1 W/MHz transmit density, 3 dB gain, -174 dBm/Hz noise
    inst = build_instance()
    snr = (0.1 / 1e6) * (10.0 ** 0.3) / (10.0 ** ((-174.0 - 30.0) / 10.0))
    expect = 30e6 * math.log2(1.0 + snr)
    got = transmission_rate(inst.channel, 0, 1.0)
    assert got == pytest.approx(expect, rel=1e-12)
    assert got == pytest.approx(1.365e9, rel=5e-4)


def test_transmission_rate_scales_linearly_in_share():
    inst = build_instance()
    r_full = transmission_rate(inst.channel, 0, 1.0)
    assert transmission_rate(inst.channel, 0, 0.25) == pytest.approx(0.25 * r_full, rel=1e-15)


def test_transmission_rate_rejects_zero_share():
    inst = build_instance()
    with pytest.raises(InputError, match="share"):
        transmission_rate(inst.channel, 0, 0.0)


def test_full_band_rates_matches_per_user_calls():
    inst = table2_instance(1)
    rates = full_band_rates(inst)
    for u in range(inst.user_count):
        assert rates[u] == transmission_rate(inst.channel, u, 1.0)


def test_cached_local_delay_is_processing_only():
    # 3 Mbit at 15 cycles/bit on a 1 Gcycle/s device takes 45 ms
    inst = build_instance(density=[15.0, 15.0, 15.0], cpu_cps=1e9)
    cc = case_cost(inst, 0, 0, rate=1e9, cached=True, local=True)
    assert cc.delay_s == pytest.approx(3e6 * 15.0 / 1e9, rel=1e-15)
    assert cc.delay_s == 0.045
    assert cc.energy_j == pytest.approx(0.3 * 0.045, rel=1e-15)


@pytest.mark.parametrize("cached,local", [(True, True), (False, True), (False, False)])
def test_case_cost_matches_reference(cached, local):
    inst = table2_instance(3)
    rate = 2e8
    for u in range(inst.user_count):
        for i in range(inst.content_count):
            t, e = reference_case(inst, u, i, rate, cached, local)
            cc = case_cost(inst, u, i, rate, cached, local)
            assert cc.delay_s == pytest.approx(t, rel=1e-12)
            assert cc.energy_j == pytest.approx(e, rel=1e-12)
            assert cc.delay_s >= 0 and cc.energy_j >= 0


def test_case_cost_rejects_cached_at_edge():
    inst = build_instance()
    with pytest.raises(InputError, match="cached"):
        case_cost(inst, 0, 0, rate=1e8, cached=True, local=False)


def test_case_cost_rejects_nonpositive_rate():
    inst = build_instance()
    with pytest.raises(InputError, match="rate"):
        case_cost(inst, 0, 0, rate=0.0, cached=False, local=True)


def test_service_cost_weights_delay_and_energy():
    inst = build_instance(energy=0.2, time=0.8)
    t, e = reference_case(inst, 0, 1, 1e8, False, False)
    assert service_cost(inst, 0, 1, 1e8, False, False) == pytest.approx(0.2 * e + 0.8 * t, rel=1e-12)


def test_expected_user_cost_is_probability_weighted_sum():
    inst = table2_instance(4)
    cache = np.zeros(inst.content_count, dtype=int)
    compute = np.zeros(inst.content_count, dtype=int)
    cache[1] = compute[1] = 1
    compute[3] = 1
    rate = 3e8
    for u in range(inst.user_count):
        expect = sum(
            float(inst.matrix.probs[u, i])
            * service_cost(inst, u, i, rate, cache[i], compute[i])
            for i in range(inst.content_count)
        )
        assert expected_user_cost(inst, u, cache, compute, rate) == pytest.approx(expect, rel=1e-12)


def test_user_delay_energy_matches_componentwise_sum():
    inst = table2_instance(4)
    cache = np.zeros(inst.content_count, dtype=int)
    compute = np.ones(inst.content_count, dtype=int)
    cache[:2] = 1
    rate = 1e8
    d, e = user_delay_energy(inst, 0, cache, compute, rate)
    d_ref = e_ref = 0.0
    for i in range(inst.content_count):
        t, en = reference_case(inst, 0, i, rate, bool(cache[i]), bool(compute[i]))
        d_ref += float(inst.matrix.probs[0, i]) * t
        e_ref += float(inst.matrix.probs[0, i]) * en
    assert d == pytest.approx(d_ref, rel=1e-12)
    assert e == pytest.approx(e_ref, rel=1e-12)


def test_user_delay_energy_rejects_cache_without_local():
    inst = build_instance()
    with pytest.raises(InputError, match="policy"):
        user_delay_energy(inst, 0, [1, 0, 0], [0, 0, 0], 1e8)


def test_zero_rate_saturates_when_downlink_needed():
    inst = build_instance()
    d, e = user_delay_energy(inst, 0, [0, 0, 0], [0, 0, 0], 0.0)
    assert math.isinf(d) and math.isinf(e)
    assert expected_user_cost(inst, 0, [0, 0, 0], [0, 0, 0], 0.0) == math.inf


def test_zero_rate_fine_when_everything_cached():
    inst = build_instance(capacity=3)
    ones = [1, 1, 1]
    d, e = user_delay_energy(inst, 0, ones, ones, 0.0)
    assert math.isfinite(d) and math.isfinite(e)
    d_ref = sum(
        float(inst.matrix.probs[0, i]) * reference_case(inst, 0, i, 1.0, True, True)[0]
        for i in range(3)
    )
    assert d == pytest.approx(d_ref, rel=1e-12)


def test_unrequested_contents_do_not_matter():
    # zero-probability content with an uncached edge placement adds nothing
    inst = build_instance(probs=np.array([[0.5, 0.5, 0.0], [0.2, 0.3, 0.5]]))
    a = expected_user_cost(inst, 0, [0, 0, 0], [1, 1, 0], 2e8)
    b = expected_user_cost(inst, 0, [0, 0, 0], [1, 1, 1], 2e8)
    assert a == pytest.approx(b, rel=1e-15)


def test_coefficient_identity_reconstructs_cost():
    """plain_tx*(d-c) + (local_proc-edge_proc-stereo_tx)*d + edge_proc+stereo_tx
    must equal the direct expectation for every legal policy row."""
    inst = table2_instance(6)
    rng = np.random.default_rng(0)
    rate = 2.5e8
    for u in range(inst.user_count):
        plain_tx, local_proc, edge_proc, stereo_tx = coefficient_arrays(inst, u, rate)
        for _ in range(8):
            compute = rng.integers(0, 2, inst.content_count)
            cache = compute * rng.integers(0, 2, inst.content_count)
            via_coeffs = float(
                np.sum(plain_tx * (compute - cache))
                + np.sum((local_proc - edge_proc - stereo_tx) * compute)
                + np.sum(edge_proc + stereo_tx)
            )
            direct = expected_user_cost(inst, u, cache, compute, rate)
            assert via_coeffs == pytest.approx(direct, rel=1e-12)


def test_cost_coefficients_are_scaled_single_content_costs():
    inst = table2_instance(2)
    u, i, rate = 1, 3, 2e8
    plain_tx, local_proc, edge_proc, stereo_tx = cost_coefficients(inst, u, i, rate)
    zeta = float(inst.matrix.probs[u, i])
    we, wt = inst.weights.for_user(u)
    dev = inst.devices[u]
    plain = inst.catalog.plain_size_bits
    cycles = plain * float(inst.catalog.cycles_per_bit[i])
    assert plain_tx == pytest.approx(zeta * (we * dev.recv_power_w + wt) * plain / rate, rel=1e-12)
    assert local_proc == pytest.approx(zeta * (we * dev.comp_power_w + wt) * cycles / dev.cpu_cps, rel=1e-12)
    assert edge_proc == pytest.approx(zeta * (we * dev.idle_power_w + wt) * cycles / inst.channel.edge_cps, rel=1e-12)
    assert stereo_tx == pytest.approx(
        zeta * (we * dev.recv_power_w + wt) * float(inst.catalog.stereo_size_bits[i]) / rate, rel=1e-12
    )


def test_coefficient_arrays_reject_nonpositive_rate():
    inst = build_instance()
    with pytest.raises(InputError):
        coefficient_arrays(inst, 0, 0.0)


def test_affine_decompose_matches_expected_cost():
    inst = table2_instance(7)
    rng = np.random.default_rng(1)
    for u in range(inst.user_count):
        compute = rng.integers(0, 2, inst.content_count)
        cache = compute * rng.integers(0, 2, inst.content_count)
        aff = affine_decompose(inst, u, cache, compute)
        assert aff.traffic >= 0 and aff.base >= 0
        for rate in (1e7, 2.5e8, 4e9):
            assert aff.at_rate(rate) == pytest.approx(
                expected_user_cost(inst, u, cache, compute, rate), rel=1e-12
            )


def test_affine_at_rate_edge_cases():
    assert AffineCost(0.0, 2.5).at_rate(0.0) == 2.5
    assert AffineCost(1.0, 2.5).at_rate(0.0) == math.inf
    assert AffineCost(1.0, 2.5).at_rate(2.0) == 3.0


def test_fully_cached_row_has_zero_traffic():
    inst = build_instance(capacity=3)
    aff = affine_decompose(inst, 0, [1, 1, 1], [1, 1, 1])
    assert aff.traffic == 0.0


def test_policy_costs_matches_per_user_expectation():
    inst = table2_instance(8)
    M, N = inst.user_count, inst.content_count
    rng = np.random.default_rng(2)
    compute = rng.integers(0, 2, (M, N))
    cache = compute * rng.integers(0, 2, (M, N))
    shares = rng.dirichlet(np.ones(M))
    got = policy_costs(inst, cache, compute, shares)
    full = full_band_rates(inst)
    for u in range(M):
        expect = expected_user_cost(inst, u, cache[u], compute[u], float(shares[u] * full[u]))
        assert got[u] == pytest.approx(expect, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(0, 50),
    share=st.floats(1e-6, 1.0),
    row=st.integers(0, 2 ** 10 - 1),
)
def test_affine_identity_property(seed, share, row):
    inst = table2_instance(seed % 5)
    compute = np.array([(row >> i) & 1 for i in range(inst.content_count)])
    cache = np.zeros_like(compute)  # cache nothing: always legal
    rate = share * float(full_band_rates(inst)[0])
    aff = affine_decompose(inst, 0, cache, compute)
    assert aff.at_rate(rate) == pytest.approx(expected_user_cost(inst, 0, cache, compute, rate), rel=1e-9)
