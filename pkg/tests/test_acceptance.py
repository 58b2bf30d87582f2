"""End-to-end acceptance gate for the solver and harness.

One test per acceptance criterion. Every test prints a single
[PASS]/[FAIL] line with the measured numbers (run pytest with -s to see
the lines for passing tests) and asserts the same condition.
"""

import math
import time
from collections import Counter
from dataclasses import replace

import numpy as np
import pytest

from factories import build_instance, joint_oracle_instance, oracle_instance, table2_instance

from edge3c.baselines import (
    InterestAwareCache,
    RandomCache,
    SchemeKind,
    UniformCache,
    ZipfCache,
    run_caching_baseline,
    run_scheme,
)
from edge3c.costs import case_cost, full_band_rates, expected_user_cost, transmission_rate
from edge3c.harness import SimDefaults, sample_instance
from edge3c.oracles import brute_force_cache_compute, brute_force_joint
from edge3c.solver import solve_cache_compute, solve_joint

AXES = {
    "edge_cps": [k * 1e9 for k in range(1, 9)],
    "cache_capacity": list(range(0, 11)),
    "users": list(range(5, 55, 5)),
    "bandwidth_hz": [k * 10e6 for k in range(1, 7)],
}
SEEDS = (0, 1, 2)
SCHEMES = (
    SchemeKind.PROPOSED,
    SchemeKind.JOINT_3C,
    SchemeKind.GREEDY_EDGE,
    SchemeKind.GREEDY_LOCAL,
)


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def table2_solves():
    """100 fair solves at the default simulation parameters."""
    return [solve_joint(table2_instance(seed)) for seed in range(100)]


@pytest.fixture(scope="module")
def family_results():
    """Every scheme solved on every sweep cell of all four parameter axes."""
    out = {}
    for param, values in AXES.items():
        for value in values:
            d = replace(SimDefaults(), **{param: value})
            for seed in SEEDS:
                inst = sample_instance(d, seed)
                out[(param, value, seed)] = {s: run_scheme(inst, s) for s in SCHEMES}
    return out


@pytest.fixture(scope="module")
def caching_results():
    """Caching disciplines across the cache-capacity axis, true-matrix costed."""
    out = {}
    for value in AXES["cache_capacity"]:
        d = replace(SimDefaults(), cache_capacity=value)
        for seed in SEEDS:
            inst = sample_instance(d, seed)
            out[(value, seed)] = {
                "interest-aware": run_caching_baseline(inst, InterestAwareCache()).max_cost,
                "uniform": run_caching_baseline(inst, UniformCache()).max_cost,
                "zipf": run_caching_baseline(inst, ZipfCache()).max_cost,
                "random": run_caching_baseline(inst, RandomCache(7)).max_cost,
            }
    return out


def test_placement_oracle_equality():
    """Greedy per-user placement ties exhaustive search on 100 small instances."""
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(100):
        inst = oracle_instance(k)
        shares = np.full(inst.user_count, 1.0 / inst.user_count)
        full = full_band_rates(inst)
        cache, compute = solve_cache_compute(inst, shares)
        bcache, bcompute = brute_force_cache_compute(inst, shares)
        for u in range(inst.user_count):
            rate = float(shares[u] * full[u])
            fast = expected_user_cost(inst, u, cache[u], compute[u], rate)
            slow = expected_user_cost(inst, u, bcache[u], bcompute[u], rate)
            worst = max(worst, abs(fast - slow) / abs(slow))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and dt < 10.0
    _report(
        "placement-oracle",
        ok,
        f"worst per-user relative gap {worst:.2e} (tol 1e-9) over 100 instances in {dt:.2f}s (limit 10s)",
    )


def test_joint_oracle_equality():
    """Alternating solve matches full joint enumeration on 50 tiny instances."""
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(50):
        inst = joint_oracle_instance(k)
        fast = solve_joint(inst).max_cost
        slow = brute_force_joint(inst).max_cost
        worst = max(worst, abs(fast - slow) / abs(slow))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-4 and dt < 60.0
    _report(
        "joint-oracle",
        ok,
        f"worst relative gap {worst:.2e} (tol 1e-4) over 50 instances in {dt:.2f}s (limit 60s)",
    )


def test_fairness_at_convergence(table2_solves):
    """Converged per-user costs equalize and the band is fully allocated."""
    worst_spread = 0.0
    worst_sum = 0.0
    for res in table2_solves:
        costs = res.per_user_costs
        worst_spread = max(worst_spread, (costs.max() - costs.min()) / costs.max())
        worst_sum = max(worst_sum, abs(float(res.policy.bandwidth.sum()) - 1.0))
    ok = worst_spread <= 1e-6 and worst_sum <= 1e-9
    _report(
        "fairness",
        ok,
        f"worst cost spread {worst_spread:.2e} (tol 1e-6), worst share-sum error {worst_sum:.2e} "
        f"(tol 1e-9) over {len(table2_solves)} instances",
    )


def test_outer_loop_convergence(table2_solves):
    """At least 95% of seeds settle within 7 iterations, all within 20."""
    iters = [res.iterations for res in table2_solves]
    dist = dict(sorted(Counter(iters).items()))
    within7 = sum(1 for i in iters if i <= 7) / len(iters)
    ok = within7 >= 0.95 and max(iters) <= 20 and all(r.converged for r in table2_solves)
    _report(
        "convergence",
        ok,
        f"iteration distribution {dist}; {within7:.0%} within 7 (need 95%), max {max(iters)} (limit 20)",
    )


def test_scheme_ordering(family_results):
    """Richer decision spaces order the worst-user cost on every sweep cell,
    and the full scheme collapses to the no-cache one when capacity is zero."""
    tol = 1e-9
    violations = []
    for key, res in family_results.items():
        prop = res[SchemeKind.PROPOSED].max_cost
        j3c = res[SchemeKind.JOINT_3C].max_cost
        edge = res[SchemeKind.GREEDY_EDGE].max_cost
        local = res[SchemeKind.GREEDY_LOCAL].max_cost
        if not (prop <= j3c + tol and j3c <= min(edge, local) + tol):
            violations.append(key)
    exact = True
    for seed in SEEDS:
        a = family_results[("cache_capacity", 0, seed)][SchemeKind.PROPOSED]
        b = family_results[("cache_capacity", 0, seed)][SchemeKind.JOINT_3C]
        if a.max_cost != b.max_cost or not np.array_equal(a.policy.compute, b.policy.compute):
            exact = False
    ok = not violations and exact
    _report(
        "scheme-ordering",
        ok,
        f"{len(family_results)} cells ordered with slack {tol}; zero-capacity collapse exact: {exact}"
        + (f"; violations {violations[:3]}" if violations else ""),
    )


def test_caching_discipline_ordering(caching_results):
    """Knowing the real interests never hurts, and with no slots (or slots for
    everything) the discipline cannot matter."""
    tol = 1e-9
    dominated = all(
        cell["interest-aware"] <= min(cell["uniform"], cell["zipf"], cell["random"]) + 1e-12
        for cell in caching_results.values()
    )
    spreads = []
    n = SimDefaults().contents
    for cap in (0, n):
        for seed in SEEDS:
            cell = caching_results[(cap, seed)]
            spreads.append(max(cell.values()) - min(cell.values()))
    coincide = max(spreads) <= tol
    ok = dominated and coincide
    _report(
        "caching-disciplines",
        ok,
        f"interest-aware dominates on {len(caching_results)} cells: {dominated}; "
        f"worst coincidence spread at capacity extremes {max(spreads):.2e} (tol {tol})",
    )


def test_monotone_trends(family_results):
    """Fair cost falls with more edge speed, cache or band, rises with more
    users; the local-only scheme cannot see edge speed or cache size."""
    slack = 1e-9
    problems = []

    def series(param, scheme):
        for seed in SEEDS:
            yield seed, [family_results[(param, v, seed)][scheme].max_cost for v in AXES[param]]

    for param in ("edge_cps", "cache_capacity", "bandwidth_hz"):
        for seed, costs in series(param, SchemeKind.PROPOSED):
            if not all(b <= a + slack for a, b in zip(costs, costs[1:])):
                problems.append(f"{param} not non-increasing at seed {seed}")
    for seed, costs in series("users", SchemeKind.PROPOSED):
        if not all(b >= a - slack for a, b in zip(costs, costs[1:])):
            problems.append(f"users not non-decreasing at seed {seed}")
    for param in ("edge_cps", "cache_capacity"):
        for seed, costs in series(param, SchemeKind.GREEDY_LOCAL):
            if any(c != costs[0] for c in costs):
                problems.append(f"greedy-local varies along {param} at seed {seed}")
    ok = not problems
    _report(
        "monotone-trends",
        ok,
        "proposed monotone along all four axes, greedy-local exactly flat in edge speed and capacity"
        if ok
        else "; ".join(problems),
    )


def test_numeric_spot_checks():
    """Two independently recomputed reference numbers pin the unit handling."""
    inst = table2_instance(0)
    # full-band rate: 30 MHz, 0.1 W per MHz transmit density, 3 dB gain,
    # -174 dBm/Hz noise floor, recomputed from scratch
    snr = (0.1 / 1e6) * (10.0 ** (3.0 / 10.0)) / (10.0 ** ((-174.0 - 30.0) / 10.0))
    rate_ref = 30e6 * math.log2(1.0 + snr)
    rate = transmission_rate(inst.channel, 0, 1.0)
    rate_rel = abs(rate - rate_ref) / rate_ref

    # cached content: 3 Mbit at 15 cycles/bit on a 1 Gcycle/s device
    tiny = build_instance(density=[15.0, 15.0, 15.0], cpu_cps=1e9)
    delay = case_cost(tiny, 0, 0, rate=1e9, cached=True, local=True).delay_s
    delay_ref = 3e6 * 15.0 / 1e9
    delay_rel = abs(delay - delay_ref) / delay_ref

    ok = rate_rel <= 1e-6 and delay_rel <= 1e-6 and abs(rate / 1e9 - 1.365) < 1e-3
    _report(
        "spot-checks",
        ok,
        f"full-band rate {rate:.6e} bit/s vs reference {rate_ref:.6e} (rel {rate_rel:.1e}); "
        f"cached delay {delay:.6f}s vs reference {delay_ref:.6f} (rel {delay_rel:.1e}); tol 1e-6",
    )
