"""Review records and the JSON-lines corpus reader."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass


class CorpusError(ValueError):
    """Bad input; the message says which record or line."""


@dataclass(frozen=True)
class ReviewRecord:
    """One review of one item by one user.

    At least one of text / rating must be present; rating, when given,
    lies in [1, 5] (stars).
    """

    user_id: str
    item_id: str
    text: str | None = None
    rating: float | None = None

    def __post_init__(self):
        if not isinstance(self.user_id, str) or not self.user_id:
            raise CorpusError("user_id must be a nonempty string")
        if not isinstance(self.item_id, str) or not self.item_id:
            raise CorpusError("item_id must be a nonempty string")
        if self.text is None and self.rating is None:
            raise CorpusError("need at least one of text or rating")
        if self.text is not None and not isinstance(self.text, str):
            raise CorpusError("text must be a string")
        if self.rating is not None:
            if isinstance(self.rating, bool) or not isinstance(self.rating, (int, float)):
                raise CorpusError("rating must be a number")
            if not 1.0 <= float(self.rating) <= 5.0:
                raise CorpusError(f"rating must lie in [1, 5], got {self.rating}")
            object.__setattr__(self, "rating", float(self.rating))


def read_reviews(path) -> list[ReviewRecord]:
    """Parse a JSON-lines review corpus.

    One object per line with user_id, item_id and at least one of text /
    rating. Blank lines are skipped and unknown keys ignored, so raw
    dataset exports load as they are. Errors name the offending line.
    """
    path = os.fspath(path)
    try:
        fh = open(path)
    except FileNotFoundError:
        raise CorpusError(f"reviews file not found: {path}") from None
    records = []
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}: line {lineno}: invalid JSON: {exc.msg}") from None
            if not isinstance(doc, dict):
                raise CorpusError(f"{path}: line {lineno}: expected an object")
            try:
                records.append(
                    ReviewRecord(
                        user_id=doc.get("user_id"),
                        item_id=doc.get("item_id"),
                        text=doc.get("text"),
                        rating=doc.get("rating"),
                    )
                )
            except CorpusError as exc:
                raise CorpusError(f"{path}: line {lineno}: {exc}") from None
    if not records:
        raise CorpusError(f"{path}: no records")
    return records
