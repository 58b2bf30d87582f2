"""Data model and file formats for the 3C VR delivery allocator.

Everything internal is SI: bits, Hz, watts, seconds, CPU cycles. Instance
files may carry engineering units (Mbits, MHz, Gcycles/s, dB, dBm/Hz); the
suffix of each key selects the conversion on load. The writer always emits
SI keys so a save/load round trip is bit exact.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

import numpy as np

# package-wide float comparison tolerances
REL_TOL = 1e-9
ABS_TOL = 1e-12
ROW_SUM_TOL = 1e-9


class InputError(ValueError):
    """Malformed instance, matrix or config input."""


class ConvergenceError(RuntimeError):
    """An iterative solve ran out of iterations."""


def nearly_equal(a: float, b: float, rel: float = REL_TOL, floor: float = ABS_TOL) -> bool:
    return abs(a - b) <= max(floor, rel * max(abs(a), abs(b)))


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_per_hz_to_w(dbm: float) -> float:
    # dBm references 1 mW
    return 10.0 ** ((dbm - 30.0) / 10.0)


def _freeze(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _same(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return (
            isinstance(a, np.ndarray)
            and isinstance(b, np.ndarray)
            and a.shape == b.shape
            and bool(np.array_equal(a, b))
        )
    return a == b


class _FieldEq:
    """Field-by-field equality that copes with ndarray members."""

    def __eq__(self, other):
        if other.__class__ is not self.__class__:
            return NotImplemented
        return all(
            _same(getattr(self, f.name), getattr(other, f.name))
            for f in dataclasses.fields(self)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ContentCatalog(_FieldEq):
    """The content library.

    One plain (2D) size shared by all contents, per-content stereo (3D)
    sizes and transcoding densities. A stereo version carries both views,
    so it is never smaller than twice the plain version.
    """

    count: int
    plain_size_bits: float
    stereo_size_bits: np.ndarray  # (N,)
    cycles_per_bit: np.ndarray    # (N,) transcoding density

    def __post_init__(self):
        object.__setattr__(self, "stereo_size_bits", _freeze(self.stereo_size_bits))
        object.__setattr__(self, "cycles_per_bit", _freeze(self.cycles_per_bit))


@dataclass(frozen=True, eq=False)
class DeviceProfile(_FieldEq):
    """One VR user device."""

    cpu_cps: float        # local transcoding speed, cycles/s
    idle_power_w: float   # draw while the edge transcodes
    recv_power_w: float   # draw while receiving on the downlink
    comp_power_w: float   # draw while transcoding locally
    cache_capacity: int   # number of contents the device can pin locally


@dataclass(frozen=True, eq=False)
class ChannelParams(_FieldEq):
    """Shared downlink and edge server parameters."""

    bandwidth_hz: float
    tx_psd_w_per_hz: float        # base station transmit power spectral density
    gains: np.ndarray             # per-user channel gain, linear, (M,)
    noise_psd_w_per_hz: float
    edge_cps: float               # edge transcoding speed per user task, cycles/s

    def __post_init__(self):
        object.__setattr__(self, "gains", _freeze(self.gains))


@dataclass(frozen=True, eq=False)
class CostWeights(_FieldEq):
    """Scalarization weights for the energy/delay trade-off.

    A global (energy, time) pair, with optional per-user override arrays of
    length M.
    """

    energy: float
    time: float
    per_user_energy: np.ndarray | None = None
    per_user_time: np.ndarray | None = None

    def __post_init__(self):
        if self.per_user_energy is not None:
            object.__setattr__(self, "per_user_energy", _freeze(self.per_user_energy))
        if self.per_user_time is not None:
            object.__setattr__(self, "per_user_time", _freeze(self.per_user_time))

    def for_user(self, u: int) -> tuple[float, float]:
        we = self.energy if self.per_user_energy is None else float(self.per_user_energy[u])
        wt = self.time if self.per_user_time is None else float(self.per_user_time[u])
        return we, wt


@dataclass(frozen=True, eq=False)
class RequestMatrix(_FieldEq):
    """Row-stochastic request probabilities, one row per user."""

    probs: np.ndarray  # (M, N)

    def __post_init__(self):
        object.__setattr__(self, "probs", _freeze(np.atleast_2d(np.asarray(self.probs, dtype=float))))

    @property
    def user_count(self) -> int:
        return self.probs.shape[0]

    @property
    def content_count(self) -> int:
        return self.probs.shape[1]


@dataclass(frozen=True, eq=False)
class Instance(_FieldEq):
    """One solvable problem: catalog, devices, channel, weights, requests."""

    catalog: ContentCatalog
    devices: tuple[DeviceProfile, ...]
    channel: ChannelParams
    weights: CostWeights
    matrix: RequestMatrix
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "devices", tuple(self.devices))

    @property
    def user_count(self) -> int:
        return len(self.devices)

    @property
    def content_count(self) -> int:
        return self.catalog.count

    def device_vector(self, attr: str) -> np.ndarray:
        return np.array([getattr(d, attr) for d in self.devices], dtype=float)


@dataclass(frozen=True, eq=False)
class Policy(_FieldEq):
    """A full allocation decision: what to cache, where to compute, bandwidth."""

    cache: np.ndarray      # (M,N) 0/1, 1 = content pinned on the device
    compute: np.ndarray    # (M,N) 0/1, 1 = transcode on the device
    bandwidth: np.ndarray  # (M,) fractions of the shared band

    def __post_init__(self):
        object.__setattr__(self, "cache", _freeze(self.cache, dtype=int))
        object.__setattr__(self, "compute", _freeze(self.compute, dtype=int))
        object.__setattr__(self, "bandwidth", _freeze(self.bandwidth))


@dataclass(frozen=True, eq=False)
class SolveResult(_FieldEq):
    """Outcome of a solve: the policy, its per-user costs, loop diagnostics."""

    policy: Policy
    per_user_costs: np.ndarray
    max_cost: float
    iterations: int
    converged: bool
    trace: tuple[float, ...]  # signed max-cost change per outer iteration

    def __post_init__(self):
        object.__setattr__(self, "per_user_costs", _freeze(self.per_user_costs))
        object.__setattr__(self, "trace", tuple(float(x) for x in self.trace))


@dataclass(frozen=True)
class Violation:
    """One broken model invariant; validation reports these instead of raising."""

    field: str
    rule: str
    value: object

    def __str__(self):
        return f"{self.field}: {self.rule} (got {self.value!r})"


def validate_instance(inst: Instance) -> list[Violation]:
    """Check every model invariant. Returns an empty list for a sound instance."""
    v: list[Violation] = []

    def bad(field, rule, value):
        v.append(Violation(field, rule, value))

    cat = inst.catalog
    n = cat.count
    m = len(inst.devices)

    if n < 1:
        bad("catalog.count", "must be at least 1", n)
    if not cat.plain_size_bits > 0:
        bad("catalog.plain_size_bits", "must be positive", cat.plain_size_bits)
    if cat.stereo_size_bits.shape != (n,):
        bad("catalog.stereo_size_bits", f"must have shape ({n},)", cat.stereo_size_bits.shape)
    if cat.cycles_per_bit.shape != (n,):
        bad("catalog.cycles_per_bit", f"must have shape ({n},)", cat.cycles_per_bit.shape)
    if cat.stereo_size_bits.shape == (n,):
        for i, s in enumerate(cat.stereo_size_bits):
            if not s >= 2.0 * cat.plain_size_bits:
                bad(f"catalog.stereo_size_bits[{i}]", "stereo size below 2x plain size", float(s))
    if cat.cycles_per_bit.shape == (n,):
        for i, s in enumerate(cat.cycles_per_bit):
            if not s > 0:
                bad(f"catalog.cycles_per_bit[{i}]", "must be positive", float(s))

    if m < 1:
        bad("devices", "need at least one device", m)
    for k, dev in enumerate(inst.devices):
        where = f"devices[{k}]"
        if not dev.cpu_cps > 0:
            bad(f"{where}.cpu_cps", "must be positive", dev.cpu_cps)
        if not 0 < dev.idle_power_w < dev.recv_power_w < dev.comp_power_w:
            bad(
                f"{where}",
                "power ordering 0 < idle < recv < comp violated",
                (dev.idle_power_w, dev.recv_power_w, dev.comp_power_w),
            )
        if int(dev.cache_capacity) != dev.cache_capacity or not 0 <= dev.cache_capacity <= n:
            bad(f"{where}.cache_capacity", f"must be an integer in [0, {n}]", dev.cache_capacity)

    ch = inst.channel
    if not ch.bandwidth_hz > 0:
        bad("channel.bandwidth_hz", "must be positive", ch.bandwidth_hz)
    if not ch.tx_psd_w_per_hz > 0:
        bad("channel.tx_psd_w_per_hz", "must be positive", ch.tx_psd_w_per_hz)
    if not ch.noise_psd_w_per_hz > 0:
        bad("channel.noise_psd_w_per_hz", "must be positive", ch.noise_psd_w_per_hz)
    if not ch.edge_cps > 0:
        bad("channel.edge_cps", "must be positive", ch.edge_cps)
    if ch.gains.shape != (m,):
        bad("channel.gains", f"must have shape ({m},)", ch.gains.shape)
    else:
        for u, g in enumerate(ch.gains):
            if not g > 0:
                bad(f"channel.gains[{u}]", "must be positive", float(g))

    w = inst.weights
    if w.energy < 0:
        bad("weights.energy", "must be nonnegative", w.energy)
    if w.time < 0:
        bad("weights.time", "must be nonnegative", w.time)
    if not w.energy + w.time > 0:
        bad("weights", "energy + time must be positive", (w.energy, w.time))
    for name, arr in (("per_user_energy", w.per_user_energy), ("per_user_time", w.per_user_time)):
        if arr is not None and arr.shape != (m,):
            bad(f"weights.{name}", f"must have shape ({m},)", arr.shape)
    if (
        w.per_user_energy is not None
        and w.per_user_time is not None
        and w.per_user_energy.shape == (m,)
        and w.per_user_time.shape == (m,)
    ):
        for u in range(m):
            we, wt = float(w.per_user_energy[u]), float(w.per_user_time[u])
            if we < 0 or wt < 0 or not we + wt > 0:
                bad(f"weights[user {u}]", "per-user weights must be nonnegative with positive sum", (we, wt))

    probs = inst.matrix.probs
    if probs.shape != (m, n):
        bad("matrix", f"must have shape ({m}, {n})", probs.shape)
    else:
        for u in range(m):
            row = probs[u]
            if np.any(row < 0) or np.any(row > 1 + ABS_TOL):
                bad(f"matrix[row {u}]", "entries must lie in [0, 1]", row.min() if np.any(row < 0) else row.max())
            s = float(row.sum())
            if abs(s - 1.0) > ROW_SUM_TOL:
                bad(f"matrix[row {u}]", "row not stochastic", s)

    return v


# ---------------------------------------------------------------------------
# instance files

def _as_int(value):
    iv = int(value)
    if iv != value:
        raise ValueError(f"expected an integer, got {value!r}")
    return iv


def _farray(value) -> np.ndarray:
    return np.asarray(value, dtype=float)


def _pick(section: dict, name: str, variants, *, required=True, default=None):
    """Fetch one logical value from a JSON section.

    variants is a list of (key, converter); exactly one key may be present.
    """
    hits = [(k, fn) for k, fn in variants if k in section]
    if len(hits) > 1:
        raise InputError(f"{name}: conflicting keys {sorted(k for k, _ in hits)}")
    if not hits:
        if required:
            raise InputError(f"{name}: missing (expected one of {[k for k, _ in variants]})")
        return default
    key, fn = hits[0]
    try:
        return fn(section[key])
    except InputError:
        raise
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name}: bad value for {key!r}: {exc}") from None


def instance_from_dict(doc: dict, base_dir: str = ".") -> Instance:
    if not isinstance(doc, dict):
        raise InputError("instance document must be a JSON object")
    for sec in ("catalog", "devices", "channel", "weights"):
        if sec not in doc:
            raise InputError(f"missing section '{sec}'")

    cs = doc["catalog"]
    catalog = ContentCatalog(
        count=_pick(cs, "catalog.count", [("count", _as_int)]),
        plain_size_bits=_pick(
            cs,
            "catalog.plain_size",
            [("plain_size_bits", float), ("plain_size_mbits", lambda x: float(x) * 1e6)],
        ),
        stereo_size_bits=_pick(
            cs,
            "catalog.stereo_size",
            [("stereo_size_bits", _farray), ("stereo_size_mbits", lambda x: _farray(x) * 1e6)],
        ),
        cycles_per_bit=_pick(cs, "catalog.cycles_per_bit", [("cycles_per_bit", _farray)]),
    )

    raw_devices = doc["devices"]
    if not isinstance(raw_devices, list) or not raw_devices:
        raise InputError("devices: need a non-empty list")
    devices = []
    for k, ds in enumerate(raw_devices):
        name = f"devices[{k}]"
        devices.append(
            DeviceProfile(
                cpu_cps=_pick(ds, f"{name}.cpu", [("cpu_cps", float), ("cpu_gcps", lambda x: float(x) * 1e9)]),
                idle_power_w=_pick(ds, f"{name}.idle_power", [("idle_power_w", float)]),
                recv_power_w=_pick(ds, f"{name}.recv_power", [("recv_power_w", float)]),
                comp_power_w=_pick(ds, f"{name}.comp_power", [("comp_power_w", float)]),
                cache_capacity=_pick(ds, f"{name}.cache_capacity", [("cache_capacity", _as_int)]),
            )
        )

    ch = doc["channel"]
    gains_raw = _pick(
        ch,
        "channel.gains",
        [
            ("gains_linear", lambda v: _farray(v)),
            ("gains_db", lambda v: 10.0 ** (_farray(v) / 10.0)),
        ],
    )
    # a scalar gain applies to every user
    gains = np.full(len(devices), float(gains_raw)) if gains_raw.ndim == 0 else gains_raw
    channel = ChannelParams(
        bandwidth_hz=_pick(
            ch, "channel.bandwidth", [("bandwidth_hz", float), ("bandwidth_mhz", lambda x: float(x) * 1e6)]
        ),
        tx_psd_w_per_hz=_pick(
            ch,
            "channel.tx_psd",
            [("tx_psd_w_per_hz", float), ("tx_psd_w_per_mhz", lambda x: float(x) / 1e6)],
        ),
        gains=gains,
        noise_psd_w_per_hz=_pick(
            ch,
            "channel.noise_psd",
            [("noise_psd_w_per_hz", float), ("noise_psd_dbm_per_hz", dbm_per_hz_to_w)],
        ),
        edge_cps=_pick(ch, "channel.edge", [("edge_cps", float), ("edge_gcps", lambda x: float(x) * 1e9)]),
    )

    ws = doc["weights"]
    weights = CostWeights(
        energy=_pick(ws, "weights.energy", [("energy", float)]),
        time=_pick(ws, "weights.time", [("time", float)]),
        per_user_energy=_pick(ws, "weights.per_user_energy", [("per_user_energy", _farray)], required=False),
        per_user_time=_pick(ws, "weights.per_user_time", [("per_user_time", _farray)], required=False),
    )

    has_inline = "matrix" in doc
    has_path = "matrix_path" in doc
    if has_inline == has_path:
        raise InputError("need exactly one of 'matrix' or 'matrix_path'")
    if has_inline:
        try:
            matrix = RequestMatrix(np.asarray(doc["matrix"], dtype=float))
        except ValueError as exc:
            raise InputError(f"matrix: {exc}") from None
    else:
        from .matrix import load_matrix

        matrix = load_matrix(os.path.join(base_dir, doc["matrix_path"]))

    seed = doc.get("seed", 0)
    try:
        seed = _as_int(seed)
    except ValueError as exc:
        raise InputError(f"seed: {exc}") from None

    return Instance(catalog, tuple(devices), channel, weights, matrix, seed=seed)


def load_instance(path) -> Instance:
    path = os.fspath(path)
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"instance file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from None
    return instance_from_dict(doc, base_dir=os.path.dirname(path) or ".")


def instance_to_dict(inst: Instance) -> dict:
    weights: dict = {"energy": float(inst.weights.energy), "time": float(inst.weights.time)}
    if inst.weights.per_user_energy is not None:
        weights["per_user_energy"] = [float(x) for x in inst.weights.per_user_energy]
    if inst.weights.per_user_time is not None:
        weights["per_user_time"] = [float(x) for x in inst.weights.per_user_time]
    return {
        "catalog": {
            "count": int(inst.catalog.count),
            "plain_size_bits": float(inst.catalog.plain_size_bits),
            "stereo_size_bits": [float(x) for x in inst.catalog.stereo_size_bits],
            "cycles_per_bit": [float(x) for x in inst.catalog.cycles_per_bit],
        },
        "devices": [
            {
                "cpu_cps": float(d.cpu_cps),
                "idle_power_w": float(d.idle_power_w),
                "recv_power_w": float(d.recv_power_w),
                "comp_power_w": float(d.comp_power_w),
                "cache_capacity": int(d.cache_capacity),
            }
            for d in inst.devices
        ],
        "channel": {
            "bandwidth_hz": float(inst.channel.bandwidth_hz),
            "tx_psd_w_per_hz": float(inst.channel.tx_psd_w_per_hz),
            "gains_linear": [float(x) for x in inst.channel.gains],
            "noise_psd_w_per_hz": float(inst.channel.noise_psd_w_per_hz),
            "edge_cps": float(inst.channel.edge_cps),
        },
        "weights": weights,
        "matrix": [[float(x) for x in row] for row in inst.matrix.probs],
        "seed": int(inst.seed),
    }


def save_instance(inst: Instance, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_dict(inst), fh, indent=2)
        fh.write("\n")
