"""Delay and energy cost of serving VR contents, plus its algebraic forms.

Serving one content to one user takes one of three legal shapes:

  cached + local   the plain version is pinned on the device, transcoded there
  fetched + local  the plain version crosses the downlink, transcoded on device
  edge             the edge transcodes, the stereo version crosses the downlink

A cached content is always transcoded locally; pinning something the device
will not transcode would waste the slot, so cached-but-edge is rejected as a
policy. Costs are the weighted sum energy_weight * E + time_weight * T of the
per-case delay and energy, averaged over the user's request probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ChannelParams, InputError, Instance


def spectral_efficiency(channel: ChannelParams, u: int) -> float:
    """Downlink bits per second per hertz for user u at full spectral density."""
    snr = channel.tx_psd_w_per_hz * float(channel.gains[u]) / channel.noise_psd_w_per_hz
    return math.log2(1.0 + snr)


def transmission_rate(channel: ChannelParams, u: int, share: float) -> float:
    """Shannon rate of user u holding `share` of the band, bits/s.

    The rate scales linearly in the share because the transmit power scales
    with the allocated band (fixed power spectral density).
    """
    if share <= 0:
        raise InputError(f"bandwidth share must be positive, got {share}")
    return share * channel.bandwidth_hz * spectral_efficiency(channel, u)


def full_band_rates(inst: Instance) -> np.ndarray:
    """Rate each user would see holding the entire band."""
    return np.array(
        [inst.channel.bandwidth_hz * spectral_efficiency(inst.channel, u) for u in range(inst.user_count)]
    )


@dataclass(frozen=True)
class CaseCost:
    delay_s: float
    energy_j: float


def case_cost(inst: Instance, u: int, i: int, rate: float, cached: bool, local: bool) -> CaseCost:
    """Delay and energy of one (user, content) service under one case."""
    if cached and not local:
        raise InputError("illegal case: a cached content must be transcoded locally")
    if rate <= 0:
        raise InputError(f"rate must be positive, got {rate}")
    dev = inst.devices[u]
    cat = inst.catalog
    plain = cat.plain_size_bits
    cycles = plain * float(cat.cycles_per_bit[i])
    if cached:
        proc = cycles / dev.cpu_cps
        return CaseCost(proc, dev.comp_power_w * proc)
    if local:
        tx = plain / rate
        proc = cycles / dev.cpu_cps
        return CaseCost(tx + proc, dev.recv_power_w * tx + dev.comp_power_w * proc)
    proc = cycles / inst.channel.edge_cps
    tx = float(cat.stereo_size_bits[i]) / rate
    return CaseCost(proc + tx, dev.idle_power_w * proc + dev.recv_power_w * tx)


def service_cost(inst: Instance, u: int, i: int, rate: float, cached, local, weights=None) -> float:
    """Weighted delay + energy of one service."""
    w = weights if weights is not None else inst.weights
    we, wt = w.for_user(u)
    cc = case_cost(inst, u, i, rate, bool(cached), bool(local))
    return we * cc.energy_j + wt * cc.delay_s


def _check_policy_row(cache_row: np.ndarray, compute_row: np.ndarray) -> None:
    if np.any(cache_row > compute_row):
        raise InputError("illegal policy row: cached contents must be transcoded locally")


def user_delay_energy(inst: Instance, u: int, cache_row, compute_row, rate: float) -> tuple[float, float]:
    """Expected delay and energy for user u under one policy row.

    Contents the user never requests contribute nothing, so a zero rate is
    fine as long as every requested content is cached; otherwise the
    expectation saturates to +inf instead of raising.
    """
    cache_row = np.asarray(cache_row, dtype=int)
    compute_row = np.asarray(compute_row, dtype=int)
    _check_policy_row(cache_row, compute_row)
    zeta = inst.matrix.probs[u]
    req = zeta > 0
    dev = inst.devices[u]
    cat = inst.catalog
    cycles = cat.plain_size_bits * cat.cycles_per_bit
    local = compute_row.astype(bool)
    cached = cache_row.astype(bool)
    tx_bits = np.where(local, np.where(cached, 0.0, cat.plain_size_bits), cat.stereo_size_bits)
    proc_delay = np.where(local, cycles / dev.cpu_cps, cycles / inst.channel.edge_cps)
    proc_power = np.where(local, dev.comp_power_w, dev.idle_power_w)
    if rate <= 0:
        if np.any(req & (tx_bits > 0)):
            return math.inf, math.inf
        tx_delay = np.zeros_like(tx_bits)
    else:
        tx_delay = tx_bits / rate
    delay = float(np.sum(zeta[req] * (tx_delay[req] + proc_delay[req])))
    energy = float(np.sum(zeta[req] * (tx_delay[req] * dev.recv_power_w + proc_delay[req] * proc_power[req])))
    return delay, energy


def expected_user_cost(inst: Instance, u: int, cache_row, compute_row, rate: float, weights=None) -> float:
    """Request-weighted cost of one user's policy row at the given rate."""
    w = weights if weights is not None else inst.weights
    we, wt = w.for_user(u)
    delay, energy = user_delay_energy(inst, u, cache_row, compute_row, rate)
    if math.isinf(delay):
        return math.inf
    return we * energy + wt * delay


def coefficient_arrays(inst: Instance, u: int, rate: float, weights=None):
    """Weighted per-content cost coefficients, each scaled by request probability.

    Returns (plain_tx, local_proc, edge_proc, stereo_tx):
      plain_tx    pulling the plain version over the downlink
      local_proc  transcoding on the device
      edge_proc   transcoding at the edge while the device idles
      stereo_tx   pulling the transcoded stereo version

    The cost of a policy row (c, d) is then
      sum(plain_tx * (d - c)) + sum((local_proc - edge_proc - stereo_tx) * d)
      + sum(edge_proc + stereo_tx).
    """
    if rate <= 0:
        raise InputError(f"rate must be positive, got {rate}")
    w = weights if weights is not None else inst.weights
    we, wt = w.for_user(u)
    dev = inst.devices[u]
    cat = inst.catalog
    zeta = inst.matrix.probs[u]
    cycles = cat.plain_size_bits * cat.cycles_per_bit
    tx_w = we * dev.recv_power_w + wt
    plain_tx = zeta * tx_w * cat.plain_size_bits / rate
    local_proc = zeta * (we * dev.comp_power_w + wt) * cycles / dev.cpu_cps
    edge_proc = zeta * (we * dev.idle_power_w + wt) * cycles / inst.channel.edge_cps
    stereo_tx = zeta * tx_w * cat.stereo_size_bits / rate
    return plain_tx, local_proc, edge_proc, stereo_tx


def cost_coefficients(inst: Instance, u: int, i: int, rate: float, weights=None):
    """The four coefficients of one (user, content) pair."""
    arrays = coefficient_arrays(inst, u, rate, weights)
    return tuple(float(a[i]) for a in arrays)


@dataclass(frozen=True)
class AffineCost:
    """One user's cost as traffic / rate + base for a fixed policy row.

    traffic collects every weighted payload that must cross the downlink;
    base is the rate-independent transcoding part.
    """

    traffic: float
    base: float

    def at_rate(self, rate: float) -> float:
        if self.traffic == 0.0:
            return self.base
        if rate <= 0:
            return math.inf
        return self.base + self.traffic / rate


def affine_decompose(inst: Instance, u: int, cache_row, compute_row, weights=None) -> AffineCost:
    """Split a policy row's expected cost into downlink and local parts."""
    cache_row = np.asarray(cache_row, dtype=float)
    compute_row = np.asarray(compute_row, dtype=float)
    _check_policy_row(cache_row, compute_row)
    w = weights if weights is not None else inst.weights
    we, wt = w.for_user(u)
    dev = inst.devices[u]
    cat = inst.catalog
    zeta = inst.matrix.probs[u]
    cycles = cat.plain_size_bits * cat.cycles_per_bit
    tx_w = we * dev.recv_power_w + wt
    traffic = float(
        np.sum(zeta * tx_w * (cat.plain_size_bits * (compute_row - cache_row) + cat.stereo_size_bits * (1.0 - compute_row)))
    )
    base = float(
        np.sum(
            zeta
            * (
                (we * dev.comp_power_w + wt) * cycles / dev.cpu_cps * compute_row
                + (we * dev.idle_power_w + wt) * cycles / inst.channel.edge_cps * (1.0 - compute_row)
            )
        )
    )
    return AffineCost(traffic, base)


def policy_costs(inst: Instance, cache, compute, shares) -> np.ndarray:
    """Per-user expected costs of a full policy, saturating at +inf where a
    user with downlink needs holds no band."""
    full = full_band_rates(inst)
    shares = np.asarray(shares, dtype=float)
    return np.array(
        [
            affine_decompose(inst, u, cache[u], compute[u]).at_rate(shares[u] * full[u])
            for u in range(inst.user_count)
        ]
    )
