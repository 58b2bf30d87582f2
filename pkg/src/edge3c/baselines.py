"""Comparison schemes for the experiments.

Two families:

  * placement schemes, which pin where transcoding happens (all edge, all
    local, or jointly optimized with caching disabled) and then receive the
    same fair band split as the proposed scheme;
  * caching disciplines, which swap the request model used to pick what to
    cache (uniform, popularity rank, random, or the true per-user interests)
    while everything else stays driven by the instance's own matrix.

Either family can alternatively be evaluated at an equal band split, which is
what the harness reports as the max/min cost pair.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .model import InputError, Instance, Policy, SolveResult
from . import costs, solver
from .matrix import RandomRows, build_matrix, zipf_weights


class SchemeKind(str, Enum):
    PROPOSED = "proposed"
    GREEDY_EDGE = "greedy-edge"
    GREEDY_LOCAL = "greedy-local"
    JOINT_3C = "joint-3c"


@dataclass(frozen=True)
class UniformCache:
    """Rank cache candidates as if every content were equally requested."""


@dataclass(frozen=True)
class ZipfCache:
    """Rank cache candidates by popularity rank, identical for every user."""

    gamma: float = 1.0


@dataclass(frozen=True)
class RandomCache:
    """Rank cache candidates by a seeded random row-stochastic matrix."""

    seed: int = 0


@dataclass(frozen=True)
class InterestAwareCache:
    """Rank cache candidates by the true per-user request probabilities."""


CachingBaseline = Union[UniformCache, ZipfCache, RandomCache, InterestAwareCache]

SCHEME_CHOICES = (
    "proposed",
    "greedy-edge",
    "greedy-local",
    "joint-3c",
    "uniform-cache",
    "zipf-cache",
    "random-cache",
    "interest-aware",
)


def parse_scheme(name: str, zipf_gamma: float = 1.0, random_seed: int = 0):
    """Scheme object for a config or CLI name."""
    try:
        return SchemeKind(name)
    except ValueError:
        pass
    if name == "uniform-cache":
        return UniformCache()
    if name == "zipf-cache":
        return ZipfCache(zipf_gamma)
    if name == "random-cache":
        return RandomCache(random_seed)
    if name == "interest-aware":
        return InterestAwareCache()
    raise InputError(f"unknown scheme {name!r}; choose from {', '.join(SCHEME_CHOICES)}")


def scheme_name(scheme) -> str:
    if isinstance(scheme, SchemeKind):
        return scheme.value
    return {
        UniformCache: "uniform-cache",
        ZipfCache: "zipf-cache",
        RandomCache: "random-cache",
        InterestAwareCache: "interest-aware",
    }[type(scheme)]


def with_cache_capacity(inst: Instance, capacity: int) -> Instance:
    if not 0 <= capacity <= inst.content_count:
        raise InputError(f"cache capacity must lie in [0, {inst.content_count}], got {capacity}")
    devices = tuple(dataclasses.replace(d, cache_capacity=int(capacity)) for d in inst.devices)
    return dataclasses.replace(inst, devices=devices)


def _equal_shares(inst: Instance) -> np.ndarray:
    return np.full(inst.user_count, 1.0 / inst.user_count)


def _fixed_placement_result(inst: Instance, cache, compute) -> SolveResult:
    bw = solver.solve_bandwidth(inst, cache, compute)
    policy = Policy(cache=cache, compute=compute, bandwidth=bw.shares)
    return SolveResult(policy, bw.per_user_costs, bw.max_cost, 1, True, ())


def _equal_split_result(inst: Instance, cache, compute) -> SolveResult:
    shares = _equal_shares(inst)
    per_user = costs.policy_costs(inst, cache, compute, shares)
    policy = Policy(cache=cache, compute=compute, bandwidth=shares)
    return SolveResult(policy, per_user, float(per_user.max()), 1, True, ())


def run_scheme(inst: Instance, kind, fair_bandwidth: bool = True) -> SolveResult:
    """Solve one placement scheme; fair band split unless told to split evenly."""
    try:
        kind = SchemeKind(kind)
    except ValueError:
        raise InputError(f"unknown scheme {kind!r}") from None
    if kind in (SchemeKind.PROPOSED, SchemeKind.JOINT_3C):
        work = with_cache_capacity(inst, 0) if kind is SchemeKind.JOINT_3C else inst
        if fair_bandwidth:
            return solver.solve_joint(work)
        cache, compute = solver.solve_cache_compute(work, _equal_shares(work))
        return _equal_split_result(work, cache, compute)
    M, N = inst.user_count, inst.content_count
    cache = np.zeros((M, N), dtype=int)
    if kind is SchemeKind.GREEDY_EDGE:
        compute = np.zeros((M, N), dtype=int)
    else:
        compute = np.ones((M, N), dtype=int)
    if fair_bandwidth:
        return _fixed_placement_result(inst, cache, compute)
    return _equal_split_result(inst, cache, compute)


def surrogate_matrix(inst: Instance, baseline: CachingBaseline):
    """Request model a caching discipline ranks candidates by; None means the
    instance's own matrix."""
    M, N = inst.user_count, inst.content_count
    if isinstance(baseline, InterestAwareCache):
        return None
    if isinstance(baseline, UniformCache):
        return np.full((M, N), 1.0 / N)
    if isinstance(baseline, ZipfCache):
        return np.tile(zipf_weights(N, baseline.gamma), (M, 1))
    if isinstance(baseline, RandomCache):
        return build_matrix(RandomRows(baseline.seed), M, N).probs
    raise InputError(f"unknown caching baseline {baseline!r}")


def run_caching_baseline(inst: Instance, baseline: CachingBaseline, fair_bandwidth: bool = True) -> SolveResult:
    """Solve with an alternative caching discipline, costed on the true matrix.

    Only the cache-slot ranking sees the surrogate request model; the compute
    placement, the band split and the reported costs all follow the instance's
    actual matrix. With no cache capacity the ranking is never consulted, and
    with capacity for everything each discipline caches its whole
    positive-saving candidate set, so at either extreme all disciplines agree.
    """
    ranking = surrogate_matrix(inst, baseline)
    if fair_bandwidth:
        return solver.solve_joint(inst, cache_ranking=ranking)
    cache, compute = solver.solve_cache_compute(inst, _equal_shares(inst), ranking)
    return _equal_split_result(inst, cache, compute)


def run_any(inst: Instance, scheme, fair_bandwidth: bool = True) -> SolveResult:
    """Dispatch on either scheme family."""
    if isinstance(scheme, (UniformCache, ZipfCache, RandomCache, InterestAwareCache)):
        return run_caching_baseline(inst, scheme, fair_bandwidth)
    return run_scheme(inst, scheme, fair_bandwidth)
