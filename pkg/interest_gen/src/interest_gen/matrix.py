"""Row-stochastic matrix CSV in the downstream solver's format.

Header user_id,c1..cN, one row per user, floats written with repr so
they round-trip exactly. Row order is the explicit user list, column
order the explicit item list; a scored pair outside those lists is an
error rather than a guess about how the corpus maps onto the catalog.
"""

from __future__ import annotations

import csv
import math

from .records import CorpusError


def build_rows(scores, users, items) -> list[list[float]]:
    """Normalized probability rows, one per user in the given order.

    Missing (user, item) pairs count as zero; a user with no positive
    score has no normalizable row and is an error.
    """
    users = list(users)
    items = list(items)
    if not users:
        raise CorpusError("need at least one user")
    if not items:
        raise CorpusError("need at least one item")
    if len(set(users)) != len(users):
        raise CorpusError("duplicate user ids")
    if len(set(items)) != len(items):
        raise CorpusError("duplicate item ids")
    known_users = set(users)
    known_items = set(items)
    for (user_id, item_id), value in scores.items():
        if user_id not in known_users:
            raise CorpusError(f"scored user {user_id!r} is not in the user list")
        if item_id not in known_items:
            raise CorpusError(f"scored item {item_id!r} is not in the item list")
        if not (math.isfinite(value) and 0.0 <= value <= 1.0):
            raise CorpusError(f"score for ({user_id}, {item_id}) must lie in [0, 1], got {value}")
    rows = []
    for user_id in users:
        raw = [float(scores.get((user_id, item_id), 0.0)) for item_id in items]
        total = sum(raw)
        if total <= 0.0:
            raise CorpusError(f"user {user_id!r} has no positive score, row cannot be normalized")
        rows.append([v / total for v in raw])
    return rows


def emit_matrix(scores, users, items, out) -> None:
    """Write the matrix CSV to a path or file-like object."""
    users = list(users)
    rows = build_rows(scores, users, items)
    own = not hasattr(out, "write")
    fh = open(out, "w", newline="") if own else out
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id"] + [f"c{k + 1}" for k in range(len(rows[0]))])
        for user_id, row in zip(users, rows):
            w.writerow([user_id] + [repr(v) for v in row])
    finally:
        if own:
            fh.close()
