"""Min-max fair joint caching, computing and bandwidth allocation.

Three nested pieces:

  solve_cache_compute  per-user caching and compute placement at fixed rates
  solve_bandwidth      fair band split at fixed placement, by bisection on the
                       common cost level every loaded user can be pushed to
  solve_joint          alternate the two until the fair cost stops moving

The placement step is exact per user because users are coupled only through
the band, and the bandwidth step is exact because each user's cost is strictly
decreasing in their own share, so the fair point is the unique level where the
shares needed to reach it fill the band.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ConvergenceError, Instance, InputError, Policy, SolveResult, _freeze
from . import costs

JOINT_REL_TOL = 1e-9
JOINT_MAX_ITERS = 50
BISECT_MAX_ITERS = 200
_BISECT_REL_WIDTH = 1e-15


def solve_cache_compute(inst: Instance, shares, cache_ranking=None) -> tuple[np.ndarray, np.ndarray]:
    """Best caching and compute placement per user at fixed bandwidth shares.

    Decoupled across users, and exact: without a cache slot each content costs
    the cheaper of edge transcoding and fetch-then-transcode-locally, and a
    slot converts a content to cached-local, whose saving over that optimum is
    independent of every other content. Contents couple only through the slot
    budget, so spending the slots on the largest strictly positive savings is
    the per-user optimum. All comparisons are done on rate-scaled costs so a
    zero rate stays well defined (caching then saves the whole transfer, which
    dominates everything else).

    cache_ranking substitutes a different request matrix for the slot-ranking
    step only, which is how the alternative caching disciplines are expressed;
    the placement comparisons and savings structure still follow the
    instance's own matrix.
    """
    shares = np.asarray(shares, dtype=float)
    if shares.shape != (inst.user_count,):
        raise InputError(f"expected {inst.user_count} bandwidth shares, got shape {shares.shape}")
    ranking = inst.matrix.probs if cache_ranking is None else np.asarray(cache_ranking, dtype=float)
    if ranking.shape != inst.matrix.probs.shape:
        raise InputError(f"cache ranking shape {ranking.shape} does not match the request matrix")
    full = costs.full_band_rates(inst)
    cat = inst.catalog
    cycles = cat.plain_size_bits * cat.cycles_per_bit
    M, N = inst.user_count, inst.content_count
    cache = np.zeros((M, N), dtype=int)
    compute = np.zeros((M, N), dtype=int)
    for u in range(M):
        dev = inst.devices[u]
        we, wt = inst.weights.for_user(u)
        zeta = inst.matrix.probs[u]
        rate = shares[u] * full[u]
        tx_w = we * dev.recv_power_w + wt
        # per-unit-probability costs, times the rate
        s_edge = tx_w * cat.stereo_size_bits + rate * (we * dev.idle_power_w + wt) * cycles / inst.channel.edge_cps
        s_local = tx_w * cat.plain_size_bits + rate * (we * dev.comp_power_w + wt) * cycles / dev.cpu_cps
        s_cached = rate * (we * dev.comp_power_w + wt) * cycles / dev.cpu_cps
        local = (s_local < s_edge) & (zeta > 0)  # tie goes to the edge
        s_best = np.where(s_local < s_edge, s_local, s_edge)
        compute[u] = local.astype(int)
        rank = ranking[u]
        saving = rank * (s_best - s_cached)
        cand = np.flatnonzero(saving > 0)
        cap = min(dev.cache_capacity, cand.size)
        if cap > 0:
            order = np.lexsort((cand, -saving[cand]))
            picked = cand[order[:cap]]
            cache[u, picked] = 1
            compute[u, picked] = 1  # a cached content is transcoded on the device
    return cache, compute


@dataclass(frozen=True, eq=False)
class BandwidthResult:
    shares: np.ndarray
    per_user_costs: np.ndarray
    max_cost: float

    def __post_init__(self):
        object.__setattr__(self, "shares", _freeze(self.shares, dtype=float))
        object.__setattr__(self, "per_user_costs", _freeze(self.per_user_costs, dtype=float))


def solve_bandwidth(inst: Instance, cache, compute) -> BandwidthResult:
    """Fair band split for a fixed placement.

    Each user's cost is affine in the inverse of their rate, so given a target
    cost level v the share that exactly reaches it is traffic / ((v - base) *
    full_rate). The fair level is the v at which those shares sum to one;
    bisection brackets it between the largest base cost (needing infinite
    shares) and a level provably reachable inside the band. Users with no
    downlink traffic sit at their base cost with a zero share.
    """
    cache = np.asarray(cache)
    compute = np.asarray(compute)
    M = inst.user_count
    aff = [costs.affine_decompose(inst, u, cache[u], compute[u]) for u in range(M)]
    traffic = np.array([a.traffic for a in aff])
    base = np.array([a.base for a in aff])
    full = costs.full_band_rates(inst)
    loaded = traffic > 0
    shares = np.zeros(M)
    if not np.any(loaded):
        per_user = base.copy()
        return BandwidthResult(shares, per_user, float(per_user.max()) if M else 0.0)
    inv = np.zeros(M)
    inv[loaded] = traffic[loaded] / full[loaded]

    def need(v: float) -> np.ndarray:
        return inv[loaded] / (v - base[loaded])

    lo = float(base[loaded].max())
    # every base is <= lo, so at hi each needed share is at most inv / sum(inv)
    # and the needs sum to at most one: hi is always feasible
    hi = lo + float(np.sum(inv[loaded]))
    for _ in range(BISECT_MAX_ITERS):
        if hi - lo <= _BISECT_REL_WIDTH * max(1.0, abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if np.sum(need(mid)) > 1.0:
            lo = mid
        else:
            hi = mid
    else:
        raise ConvergenceError("fair bandwidth bisection did not converge")
    v = hi  # feasible side of the bracket
    s = need(v)
    s = s / s.sum()  # spend the whole band
    shares[loaded] = s
    per_user = base.copy()
    per_user[loaded] = base[loaded] + inv[loaded] / shares[loaded]
    return BandwidthResult(shares, per_user, float(per_user.max()))


def solve_joint(inst: Instance, initial_shares=None, cache_ranking=None) -> SolveResult:
    """Alternate placement and band split until the fair cost settles.

    Starts from an equal split unless given shares to warm-start from. The
    trace records the change of the fair cost each iteration against the
    previous placement's fair cost at the incoming shares, so a warm restart
    from a solved point records a single zero-delta iteration.

    With the instance's own matrix driving the cache ranking every iteration
    lowers the fair cost, so the loop is a plain descent to a fixed point.
    A surrogate ranking does not minimize the true cost, and the alternation
    can then cycle between placements; the loop treats each iterate as a
    proposal, and the first one that raises the fair cost ends the loop with
    the incumbent kept, so the reported policy is always the best one seen.
    """
    M = inst.user_count
    if initial_shares is None:
        shares = np.full(M, 1.0 / M)
    else:
        shares = np.asarray(initial_shares, dtype=float)
        if shares.shape != (M,):
            raise InputError(f"expected {M} initial shares, got shape {shares.shape}")
        if np.any(shares < 0) or not np.isclose(shares.sum(), 1.0, rtol=0, atol=1e-6):
            raise InputError("initial shares must be nonnegative and sum to 1")
    prev_cost = None
    trace = []
    converged = False
    iterations = 0
    incumbent = None  # (cache, compute, BandwidthResult)
    for it in range(1, JOINT_MAX_ITERS + 1):
        cache, compute = solve_cache_compute(inst, shares, cache_ranking)
        if prev_cost is None:
            ref = costs.policy_costs(inst, cache, compute, shares)
            prev_cost = float(np.max(ref))
        bw = solve_bandwidth(inst, cache, compute)
        delta = bw.max_cost - prev_cost
        trace.append(delta)
        iterations = it
        if incumbent is not None and delta > JOINT_REL_TOL * max(1.0, abs(bw.max_cost)):
            converged = True  # non-improving proposal: keep the incumbent
            break
        incumbent = (cache, compute, bw)
        shares = bw.shares
        if abs(delta) <= JOINT_REL_TOL * max(1.0, abs(bw.max_cost)):
            converged = True
            break
        prev_cost = bw.max_cost
    assert incumbent is not None
    cache, compute, bw = incumbent
    policy = Policy(cache=cache, compute=compute, bandwidth=bw.shares)
    return SolveResult(
        policy=policy,
        per_user_costs=bw.per_user_costs,
        max_cost=bw.max_cost,
        iterations=iterations,
        converged=converged,
        trace=tuple(trace),
    )
