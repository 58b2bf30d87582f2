"""Randomized instance sampling and parameter sweeps over the scheme zoo.

Instances follow the simulation defaults (5 users, 10 contents, 30 MHz, a
2 Gcycles/s edge) with device, content and interest draws from per-index
substreams of a seeded generator, so growing the user count extends an
instance instead of reshuffling it and reruns are bit-reproducible.

A sweep walks one parameter axis, solves every (value, seed, scheme) cell
twice (fair band split, and an even split for the max/min cost columns) and
emits tidy CSV rows plus per-seed convergence traces.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .model import (
    ChannelParams,
    ContentCatalog,
    CostWeights,
    DeviceProfile,
    InputError,
    Instance,
    RequestMatrix,
    db_to_linear,
)
from .matrix import normalize_rows
from . import baselines, costs, solver

# substream tags so draws never alias across roles
_DEVICE_TAG = 1
_CONTENT_TAG = 2
_ROW_TAG = 3
_BASELINE_TAG = 4


@dataclass(frozen=True)
class SimDefaults:
    users: int = 5
    contents: int = 10
    cache_capacity: int = 4
    bandwidth_hz: float = 30e6
    edge_cps: float = 2e9
    plain_size_bits: float = 3e6
    stereo_size_range_bits: tuple[float, float] = (6e6, 8e6)
    density_range_cpb: tuple[float, float] = (10.0, 20.0)
    cpu_range_cps: tuple[float, float] = (0.5e9, 1.5e9)
    idle_power_range_w: tuple[float, float] = (0.001, 0.009)
    recv_power_range_w: tuple[float, float] = (0.01, 0.09)
    comp_power_range_w: tuple[float, float] = (0.1, 0.5)
    gain_db: float = 3.0
    tx_psd_w_per_hz: float = 1e-7
    noise_psd_w_per_hz: float = 10.0 ** ((-174.0 - 30.0) / 10.0)
    energy_weight: float = 0.2
    time_weight: float = 0.8


def _substream(seed: int, tag: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, tag, index]))


def sample_instance(defaults: SimDefaults, seed: int) -> Instance:
    """Draw one randomized instance; the same seed always gives the same one.

    Every device, content and interest row has its own substream keyed by its
    index, so an instance sampled with more users contains the smaller one.
    """
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise InputError(f"seed must be a nonnegative integer, got {seed!r}")
    d = defaults
    if d.users < 1:
        raise InputError("defaults need at least one user")
    if d.contents < 1:
        raise InputError("defaults need at least one content")
    if not 0 <= d.cache_capacity <= d.contents:
        raise InputError(f"cache capacity must lie in [0, {d.contents}], got {d.cache_capacity}")
    devices = []
    for u in range(d.users):
        rng = _substream(seed, _DEVICE_TAG, u)
        idle = rng.uniform(*d.idle_power_range_w)
        recv = rng.uniform(*d.recv_power_range_w)
        comp = rng.uniform(*d.comp_power_range_w)
        cpu = rng.uniform(*d.cpu_range_cps)
        devices.append(
            DeviceProfile(
                cpu_cps=cpu,
                idle_power_w=idle,
                recv_power_w=recv,
                comp_power_w=comp,
                cache_capacity=d.cache_capacity,
            )
        )
    stereo = np.empty(d.contents)
    density = np.empty(d.contents)
    for i in range(d.contents):
        rng = _substream(seed, _CONTENT_TAG, i)
        stereo[i] = rng.uniform(*d.stereo_size_range_bits)
        density[i] = rng.uniform(*d.density_range_cpb)
    rows = np.empty((d.users, d.contents))
    for u in range(d.users):
        rng = _substream(seed, _ROW_TAG, u)
        rows[u] = rng.uniform(0.0, 1.0, d.contents)
    catalog = ContentCatalog(
        count=d.contents,
        plain_size_bits=d.plain_size_bits,
        stereo_size_bits=stereo,
        cycles_per_bit=density,
    )
    channel = ChannelParams(
        bandwidth_hz=d.bandwidth_hz,
        tx_psd_w_per_hz=d.tx_psd_w_per_hz,
        gains=np.full(d.users, db_to_linear(d.gain_db)),
        noise_psd_w_per_hz=d.noise_psd_w_per_hz,
        edge_cps=d.edge_cps,
    )
    weights = CostWeights(energy=d.energy_weight, time=d.time_weight)
    return Instance(
        catalog=catalog,
        devices=tuple(devices),
        channel=channel,
        weights=weights,
        matrix=RequestMatrix(normalize_rows(rows)),
        seed=int(seed),
    )


PARAMETERS = ("edge_cps", "cache_capacity", "users", "bandwidth_hz")

DEFAULT_AXES = {
    "edge_cps": tuple(float(g) * 1e9 for g in range(1, 9)),
    "cache_capacity": tuple(range(0, 11)),
    "users": tuple(range(5, 51, 5)),
    "bandwidth_hz": tuple(float(b) * 1e6 for b in range(10, 61, 10)),
}

_RECORD_GROUPS = ("cost", "delay", "energy")


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    seeds: tuple
    schemes: tuple
    defaults: SimDefaults = SimDefaults()
    record: tuple = _RECORD_GROUPS
    zipf_gamma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "seeds", tuple(self.seeds))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "record", tuple(self.record))
        if self.parameter not in PARAMETERS:
            raise InputError(f"unknown sweep parameter {self.parameter!r}; choose from {PARAMETERS}")
        if not self.values:
            raise InputError("sweep needs a nonempty values list")
        diffs = np.diff(np.asarray(self.values, dtype=float))
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise InputError("sweep values must be strictly monotone")
        if not self.seeds:
            raise InputError("sweep needs a nonempty seeds list")
        for s in self.seeds:
            if not isinstance(s, (int, np.integer)) or s < 0:
                raise InputError(f"seeds must be nonnegative integers, got {s!r}")
        if not self.schemes:
            raise InputError("sweep needs a nonempty schemes list")
        for name in self.schemes:
            baselines.parse_scheme(name)
        for group in self.record:
            if group not in _RECORD_GROUPS:
                raise InputError(f"unknown record group {group!r}; choose from {_RECORD_GROUPS}")
        if self.zipf_gamma < 0:
            raise InputError("zipf gamma must be nonnegative")
        if self.parameter == "cache_capacity":
            for v in self.values:
                if int(v) != v or not 0 <= int(v) <= self.defaults.contents:
                    raise InputError(f"cache capacity values must be integers in [0, {self.defaults.contents}]")
        if self.parameter == "users":
            for v in self.values:
                if int(v) != v or int(v) < 1:
                    raise InputError("user count values must be positive integers")
        if self.parameter in ("edge_cps", "bandwidth_hz"):
            for v in self.values:
                if not v > 0:
                    raise InputError(f"{self.parameter} values must be positive")


RESULT_COLUMNS = (
    "sweep_param",
    "value",
    "seed",
    "scheme",
    "max_cost",
    "min_cost",
    "fair_cost",
    "mean_delay_s",
    "mean_energy_j",
    "iterations",
    "converged",
)

TRACE_COLUMNS = ("seed", "iteration", "delta_cost")


def _apply_value(defaults: SimDefaults, parameter: str, value) -> SimDefaults:
    if parameter == "edge_cps":
        return replace(defaults, edge_cps=float(value))
    if parameter == "cache_capacity":
        return replace(defaults, cache_capacity=int(value))
    if parameter == "users":
        return replace(defaults, users=int(value))
    return replace(defaults, bandwidth_hz=float(value))


def _cell_scheme(spec: SweepSpec, name: str, seed: int):
    surrogate_seed = int(np.random.SeedSequence([seed, _BASELINE_TAG]).generate_state(1)[0])
    return baselines.parse_scheme(name, zipf_gamma=spec.zipf_gamma, random_seed=surrogate_seed)


def _mean_delay_energy(inst: Instance, result) -> tuple[float, float]:
    full = costs.full_band_rates(inst)
    delays = np.empty(inst.user_count)
    energies = np.empty(inst.user_count)
    for u in range(inst.user_count):
        rate = float(result.policy.bandwidth[u] * full[u])
        delays[u], energies[u] = costs.user_delay_energy(
            inst, u, result.policy.cache[u], result.policy.compute[u], rate
        )
    return float(delays.mean()), float(energies.mean())


def _cell_row(spec: SweepSpec, value, seed: int, name: str) -> dict:
    base = {
        "sweep_param": spec.parameter,
        "value": int(value) if spec.parameter in ("cache_capacity", "users") else float(value),
        "seed": int(seed),
        "scheme": name,
    }
    try:
        d = _apply_value(spec.defaults, spec.parameter, value)
        inst = sample_instance(d, seed)
        scheme = _cell_scheme(spec, name, seed)
        fair = baselines.run_any(inst, scheme, fair_bandwidth=True)
        equal = baselines.run_any(inst, scheme, fair_bandwidth=False)
        delay, energy = _mean_delay_energy(inst, fair)
    except Exception:
        base.update(
            max_cost=math.nan,
            min_cost=math.nan,
            fair_cost=math.nan,
            mean_delay_s=math.nan,
            mean_energy_j=math.nan,
            iterations=0,
            converged=False,
        )
        return base
    base.update(
        max_cost=float(np.max(equal.per_user_costs)),
        min_cost=float(np.min(equal.per_user_costs)),
        fair_cost=float(fair.max_cost),
        mean_delay_s=delay,
        mean_energy_j=energy,
        iterations=int(fair.iterations),
        converged=bool(fair.converged),
    )
    return base


def _cell_star(args):
    return _cell_row(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[dict]:
    """All sweep cells as result rows, ordered by (value, seed, scheme).

    Cells are independent, so jobs > 1 fans them out over processes; the
    output order is fixed either way. A cell that raises is kept as a row of
    NaNs with converged=false rather than aborting the sweep.
    """
    cells = [(spec, value, seed, name) for value in spec.values for seed in spec.seeds for name in spec.schemes]
    if jobs < 1:
        raise InputError(f"jobs must be at least 1, got {jobs}")
    if jobs == 1 or len(cells) <= 1:
        return [_cell_row(*c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_cell_star, cells))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_results_csv(rows, out) -> None:
    """Write result rows with a stable float formatting, newline line ends."""
    _write_csv(out, RESULT_COLUMNS, rows)


def _write_csv(out, columns, rows) -> None:
    if hasattr(out, "write"):
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])
        return
    with open(out, "w", newline="") as fh:
        _write_csv(fh, columns, rows)


SUMMARY_COLUMNS = (
    "sweep_param",
    "value",
    "scheme",
    "n_seeds",
    "max_cost_mean",
    "max_cost_std",
    "min_cost_mean",
    "min_cost_std",
    "fair_cost_mean",
    "fair_cost_std",
    "mean_delay_s_mean",
    "mean_delay_s_std",
    "mean_energy_j_mean",
    "mean_energy_j_std",
    "converged_all",
)

_SUMMARY_FIELDS = ("max_cost", "min_cost", "fair_cost", "mean_delay_s", "mean_energy_j")


def summarize(rows) -> list[dict]:
    """Per (value, scheme) means and sample standard deviations over seeds."""
    groups: dict[tuple, list[dict]] = {}
    order = []
    for row in rows:
        key = (row["value"], row["scheme"])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    out = []
    for key in order:
        members = groups[key]
        summary = {
            "sweep_param": members[0]["sweep_param"],
            "value": key[0],
            "scheme": key[1],
            "n_seeds": len(members),
            "converged_all": all(m["converged"] for m in members),
        }
        for field in _SUMMARY_FIELDS:
            vals = np.array([m[field] for m in members], dtype=float)
            summary[field + "_mean"] = float(vals.mean())
            summary[field + "_std"] = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
        out.append(summary)
    return out


def write_summary_csv(rows, out) -> None:
    _write_csv(out, SUMMARY_COLUMNS, summarize(rows))


def convergence_trace(inst: Instance, initial_shares=None) -> tuple[float, ...]:
    """Magnitude of the fair-cost change per outer iteration of a joint solve."""
    res = solver.solve_joint(inst, initial_shares)
    return tuple(abs(d) for d in res.trace)


def trace_rows(defaults: SimDefaults, seeds) -> list[dict]:
    """Convergence trace rows for freshly sampled instances, one per seed."""
    rows = []
    for seed in seeds:
        inst = sample_instance(defaults, seed)
        for k, delta in enumerate(convergence_trace(inst), start=1):
            rows.append({"seed": int(seed), "iteration": k, "delta_cost": float(delta)})
    return rows


def write_trace_csv(rows, out) -> None:
    _write_csv(out, TRACE_COLUMNS, rows)
