"""Exhaustive reference solvers for verifying the fast path on small inputs.

Everything here trades speed for transparency: placements are enumerated
outright and the band split is recovered either from the roots of the
fair-level polynomial or by brute grid search, so none of the production
solver's shortcuts are shared.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import InputError, Instance, _freeze
from . import costs

_ENUM_MAX_CELLS = 20
_JOINT_MAX_USERS = 3
_JOINT_MAX_CONTENTS = 4


def enumerate_policy_rows(content_count: int, capacity: int):
    """All legal (cache_row, compute_row) pairs for one user, in a fixed order.

    Compute vectors iterate lexicographically; for each, cache subsets of the
    locally transcoded contents grow from empty to the capacity limit.
    """
    for compute in itertools.product((0, 1), repeat=content_count):
        local = [i for i, d in enumerate(compute) if d]
        for k in range(0, min(capacity, len(local)) + 1):
            for picks in itertools.combinations(local, k):
                cache = [0] * content_count
                for i in picks:
                    cache[i] = 1
                yield tuple(cache), compute


def brute_force_cache_compute(inst: Instance, shares) -> tuple[np.ndarray, np.ndarray]:
    """Per-user exhaustive placement search at fixed bandwidth shares."""
    if inst.user_count * inst.content_count > _ENUM_MAX_CELLS:
        raise InputError(f"placement enumeration supports at most {_ENUM_MAX_CELLS} users x contents")
    shares = np.asarray(shares, dtype=float)
    full = costs.full_band_rates(inst)
    M, N = inst.user_count, inst.content_count
    cache = np.zeros((M, N), dtype=int)
    compute = np.zeros((M, N), dtype=int)
    for u in range(M):
        rate = float(shares[u] * full[u])
        best = math.inf
        best_rows = None
        for c_row, d_row in enumerate_policy_rows(N, inst.devices[u].cache_capacity):
            val = costs.expected_user_cost(inst, u, np.array(c_row), np.array(d_row), rate)
            if val < best:
                best = val
                best_rows = (c_row, d_row)
        assert best_rows is not None
        cache[u] = best_rows[0]
        compute[u] = best_rows[1]
    return cache, compute


def _exact_fair_split(traffic: np.ndarray, base: np.ndarray, full: np.ndarray):
    """Shares equalizing every loaded user's cost, from the level equation.

    With cost_u = base_u + inv_u / share_u, the common level v satisfies
    sum(inv_u / (v - base_u)) = 1. Clearing denominators turns that into a
    polynomial whose largest real root is the fair level (the left side falls
    from +inf to 0 past the largest base, so exactly one root lies there).
    """
    loaded = traffic > 0
    shares = np.zeros(traffic.size)
    per_user = base.copy()
    if not np.any(loaded):
        return shares, per_user, float(per_user.max()) if per_user.size else 0.0
    inv = traffic[loaded] / full[loaded]
    b = base[loaded]
    poly = np.poly(b)
    for j in range(b.size):
        others = np.delete(b, j)
        poly = np.polysub(poly, inv[j] * np.poly(others))
    roots = np.roots(poly)
    real = roots[np.abs(roots.imag) <= 1e-9 * np.maximum(1.0, np.abs(roots.real))].real
    lo = float(b.max())
    if real.size == 0 or real.max() <= lo:
        raise RuntimeError("fair level polynomial lost its root")
    v = float(real.max())
    s = inv / (v - b)
    s = s / s.sum()
    shares[loaded] = s
    per_user[loaded] = b + inv / s
    return shares, per_user, float(per_user.max())


@dataclass(frozen=True, eq=False)
class OracleJointResult:
    cache: np.ndarray
    compute: np.ndarray
    shares: np.ndarray
    per_user_costs: np.ndarray
    max_cost: float

    def __post_init__(self):
        object.__setattr__(self, "cache", _freeze(self.cache, dtype=int))
        object.__setattr__(self, "compute", _freeze(self.compute, dtype=int))
        object.__setattr__(self, "shares", _freeze(self.shares, dtype=float))
        object.__setattr__(self, "per_user_costs", _freeze(self.per_user_costs, dtype=float))


def brute_force_joint(inst: Instance, grid_points: int = 0) -> OracleJointResult:
    """Exhaustive search over every legal placement, fair split per placement.

    The inner split uses the polynomial fair level, or a simplex grid search
    when grid_points is positive (slower, fully numeric). Intended for tiny
    instances only.
    """
    M, N = inst.user_count, inst.content_count
    if M > _JOINT_MAX_USERS or N > _JOINT_MAX_CONTENTS:
        raise InputError(
            f"joint enumeration supports at most {_JOINT_MAX_USERS} users and {_JOINT_MAX_CONTENTS} contents"
        )
    full = costs.full_band_rates(inst)
    per_user_rows = []
    for u in range(M):
        rows = []
        for c_row, d_row in enumerate_policy_rows(N, inst.devices[u].cache_capacity):
            aff = costs.affine_decompose(inst, u, np.array(c_row), np.array(d_row))
            rows.append((c_row, d_row, aff.traffic, aff.base))
        per_user_rows.append(rows)
    best = math.inf
    best_pick = None
    traffic = np.zeros(M)
    base = np.zeros(M)
    for combo in itertools.product(*(range(len(r)) for r in per_user_rows)):
        for u, k in enumerate(combo):
            traffic[u] = per_user_rows[u][k][2]
            base[u] = per_user_rows[u][k][3]
        if grid_points > 0:
            _, _, top = _grid_split(traffic, base, full, grid_points)
        else:
            _, _, top = _exact_fair_split(traffic, base, full)
        if top < best:
            best = top
            best_pick = combo
    assert best_pick is not None
    cache = np.array([per_user_rows[u][k][0] for u, k in enumerate(best_pick)], dtype=int)
    compute = np.array([per_user_rows[u][k][1] for u, k in enumerate(best_pick)], dtype=int)
    for u, k in enumerate(best_pick):
        traffic[u] = per_user_rows[u][k][2]
        base[u] = per_user_rows[u][k][3]
    shares, per_user, top = _exact_fair_split(traffic, base, full)
    return OracleJointResult(cache, compute, shares, per_user, top)


def _grid_costs(traffic, base, full, shares_grid):
    """Worst per-user cost at every candidate split, vectorized over the grid."""
    with np.errstate(divide="ignore"):
        cost = base[:, None] + np.where(
            traffic[:, None] > 0,
            (traffic / full)[:, None] / shares_grid,
            0.0,
        )
    return cost.max(axis=0)


def _grid_split(traffic, base, full, points: int):
    loaded = traffic > 0
    if not np.any(loaded):
        shares = np.zeros(traffic.size)
        return shares, base.copy(), float(base.max())
    idx = np.flatnonzero(loaded)
    m = idx.size
    lo = np.zeros(m)
    hi = np.ones(m)
    best_shares = None
    for _ in range(4):
        axes = [np.linspace(lo[j], hi[j], points) for j in range(m)]
        if m == 1:
            grid = np.ones((1, 1))
        else:
            mesh = np.meshgrid(*axes[:-1], indexing="ij")
            head = np.stack([g.ravel() for g in mesh])
            tail = 1.0 - head.sum(axis=0)
            keep = tail > 0
            grid = np.vstack([head[:, keep], tail[keep]])
            if grid.shape[1] == 0:
                lo = np.maximum(lo - 0.1, 0.0)
                hi = np.minimum(hi + 0.1, 1.0)
                continue
        gmask = (grid > 0).all(axis=0)
        grid = grid[:, gmask]
        worst = _grid_costs(traffic[idx], base[idx], full[idx], grid)
        k = int(np.argmin(worst))
        best_shares = grid[:, k]
        if m == 1:
            break
        step = np.array([(hi[j] - lo[j]) / (points - 1) for j in range(m)])
        lo = np.maximum(best_shares - 2 * step, 1e-12)
        hi = np.minimum(best_shares + 2 * step, 1.0)
    assert best_shares is not None
    shares = np.zeros(traffic.size)
    shares[idx] = best_shares / best_shares.sum()
    per_user = base.copy()
    per_user[idx] = base[idx] + (traffic[idx] / full[idx]) / shares[idx]
    return shares, per_user, float(per_user.max())


def grid_search_bandwidth(inst: Instance, cache, compute, points: int = 201):
    """Brute grid search for the fair band split at a fixed placement.

    Refines a simplex grid around the incumbent a few times; the worst-user
    cost is convex in the shares, so the incumbent cannot be trapped away
    from the optimum. Supports up to 3 users.
    """
    M = inst.user_count
    if M > 3:
        raise InputError("grid search supports at most 3 users")
    if points < 5:
        raise InputError("grid search needs at least 5 points per axis")
    cache = np.asarray(cache)
    compute = np.asarray(compute)
    aff = [costs.affine_decompose(inst, u, cache[u], compute[u]) for u in range(M)]
    traffic = np.array([a.traffic for a in aff])
    base = np.array([a.base for a in aff])
    full = costs.full_band_rates(inst)
    shares, per_user, top = _grid_split(traffic, base, full, points)
    return shares, per_user, top
