"""Request matrix builders and the user_id,c1..cN CSV format."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .model import InputError, RequestMatrix, ROW_SUM_TOL


@dataclass(frozen=True)
class Uniform:
    """Every content equally likely for every user."""


@dataclass(frozen=True)
class Zipf:
    """Popularity by column rank: p_i proportional to (i+1)**-gamma."""

    gamma: float = 1.0


@dataclass(frozen=True)
class RandomRows:
    """Independent uniform draws per entry, rows normalized."""

    seed: int = 0


@dataclass(frozen=True)
class FromFile:
    """Raw per-user interest scores from a CSV, rows normalized."""

    path: str


MatrixSource = Uniform | Zipf | RandomRows | FromFile


def zipf_weights(contents: int, gamma: float = 1.0) -> np.ndarray:
    if contents < 1:
        raise InputError("zipf: need at least one content")
    if gamma < 0:
        raise InputError(f"zipf: gamma must be nonnegative, got {gamma}")
    ranks = np.arange(1, contents + 1, dtype=float)
    w = ranks ** -gamma
    return w / w.sum()


def normalize_rows(raw) -> np.ndarray:
    """Scale each row to sum 1. Rejects negative entries and dead rows."""
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2:
        raise InputError(f"matrix: expected 2 dimensions, got {raw.ndim}")
    if not np.isfinite(raw).all():
        raise InputError("matrix: non-finite entry")
    neg = np.argwhere(raw < 0)
    if len(neg):
        u, i = neg[0]
        raise InputError(f"matrix: negative entry at row {u + 1}, column {i + 1}")
    sums = raw.sum(axis=1)
    dead = np.flatnonzero(sums <= 0)
    if len(dead):
        raise InputError(f"matrix: row {dead[0] + 1} has no positive mass, cannot normalize")
    return raw / sums[:, None]


def build_matrix(source: MatrixSource, users: int, contents: int) -> RequestMatrix:
    if users < 1 or contents < 1:
        raise InputError(f"matrix: need at least one user and one content, got {users}x{contents}")
    if isinstance(source, Uniform):
        probs = np.full((users, contents), 1.0 / contents)
    elif isinstance(source, Zipf):
        probs = np.tile(zipf_weights(contents, source.gamma), (users, 1))
    elif isinstance(source, RandomRows):
        rng = np.random.default_rng(source.seed)
        probs = normalize_rows(rng.uniform(size=(users, contents)))
    elif isinstance(source, FromFile):
        _, raw = read_matrix_csv(source.path)
        if raw.shape != (users, contents):
            raise InputError(
                f"{source.path}: expected a {users}x{contents} matrix, found {raw.shape[0]}x{raw.shape[1]}"
            )
        probs = normalize_rows(raw)
    else:
        raise InputError(f"unknown matrix source: {source!r}")
    return RequestMatrix(probs)


def read_matrix_csv(path) -> tuple[list[str], np.ndarray]:
    """Parse the CSV layout (header user_id,c1..cN, one row per user).

    Returns the user ids and the raw values without any normalization.
    """
    path = os.fspath(path)
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise InputError(f"matrix file not found: {path}") from None
    with fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise InputError(f"{path}: empty file")
    header = rows[0]
    if len(header) < 2 or header[0] != "user_id" or any(h != f"c{k + 1}" for k, h in enumerate(header[1:])):
        raise InputError(f"{path}: bad header, expected user_id,c1,...,cN")
    n = len(header) - 1
    ids: list[str] = []
    data: list[list[float]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != n + 1:
            raise InputError(f"{path}: line {lineno}: expected {n + 1} fields, got {len(row)}")
        ids.append(row[0])
        try:
            data.append([float(x) for x in row[1:]])
        except ValueError:
            raise InputError(f"{path}: line {lineno}: non-numeric entry") from None
    if not data:
        raise InputError(f"{path}: no data rows")
    return ids, np.asarray(data, dtype=float)


def load_matrix(path) -> RequestMatrix:
    """Load a stored matrix.

    Rows that are already stochastic are kept bit exact; anything else is
    normalized, or rejected if normalization cannot make the row stochastic.
    """
    _, raw = read_matrix_csv(path)
    sums = raw.sum(axis=1)
    if np.all(raw >= 0) and np.all(np.abs(sums - 1.0) <= ROW_SUM_TOL):
        return RequestMatrix(raw)
    return RequestMatrix(normalize_rows(raw))


def save_matrix(matrix, path, user_ids=None) -> None:
    """Write the CSV layout. Values are written with repr, which round-trips
    doubles exactly."""
    probs = matrix.probs if isinstance(matrix, RequestMatrix) else np.asarray(matrix, dtype=float)
    users, contents = probs.shape
    if user_ids is None:
        user_ids = [f"u{k + 1}" for k in range(users)]
    elif len(user_ids) != users:
        raise InputError(f"matrix: got {len(user_ids)} user ids for {users} rows")
    own = not hasattr(path, "write")
    fh = open(path, "w", newline="") if own else path
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id"] + [f"c{k + 1}" for k in range(contents)])
        for uid, row in zip(user_ids, probs):
            w.writerow([uid] + [repr(float(x)) for x in row])
    finally:
        if own:
            fh.close()
