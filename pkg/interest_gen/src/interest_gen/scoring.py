"""Per-(user, item) interest scores in [0, 1] from review records.

The default scorer averages token valences from a small built-in lexicon
and maps them affinely onto [0, 1]; text that matches nothing scores a
neutral 0.5. A learned sentiment model would do better on real corpora,
but the downstream contract only needs a deterministic value per pair,
and the scorer argument accepts any callable for plugging one in.
"""

from __future__ import annotations

import re

from .records import CorpusError, ReviewRecord

_WORD = re.compile(r"[a-z']+")

# token -> valence in [-3, 3]
LEXICON = {
    "amazing": 3, "awesome": 3, "fantastic": 3, "incredible": 3,
    "outstanding": 3, "superb": 3, "breathtaking": 3, "masterpiece": 3,
    "great": 2, "excellent": 2, "wonderful": 2, "love": 2, "loved": 2,
    "beautiful": 2, "stunning": 2, "brilliant": 2, "immersive": 2,
    "impressive": 2, "gorgeous": 2, "perfect": 2,
    "good": 1, "nice": 1, "fun": 1, "enjoyable": 1, "enjoyed": 1,
    "smooth": 1, "crisp": 1, "solid": 1, "pleasant": 1, "comfortable": 1,
    "recommend": 1, "liked": 1, "like": 1, "sharp": 1, "vivid": 1,
    "meh": -1, "bland": -1, "dull": -1, "mediocre": -1, "boring": -1,
    "grainy": -1, "slow": -1, "dated": -1, "clunky": -1, "flat": -1,
    "fuzzy": -1,
    "bad": -2, "poor": -2, "annoying": -2, "ugly": -2, "frustrating": -2,
    "laggy": -2, "blurry": -2, "choppy": -2, "disappointing": -2,
    "dizzy": -2, "nauseating": -2, "sick": -2,
    "terrible": -3, "awful": -3, "horrible": -3, "unwatchable": -3,
    "unbearable": -3, "garbage": -3, "worst": -3, "broken": -3,
}

SCORERS = ("lexicon", "rating-scaled")


def lexicon_score(text: str | None) -> float:
    """Mean lexicon valence of the text, mapped onto [0, 1]; 0.5 if no
    token matches (or there is no text at all)."""
    hits = [LEXICON[w] for w in _WORD.findall((text or "").lower()) if w in LEXICON]
    if not hits:
        return 0.5
    return (sum(hits) / len(hits) + 3.0) / 6.0


def _rating_scaled(rec: ReviewRecord) -> float:
    # 1..5 stars -> 0..1; a missing rating is an error rather than an
    # invented neutral star count
    if rec.rating is None:
        raise CorpusError(f"({rec.user_id}, {rec.item_id}): rating-scaled scorer needs a rating")
    return (rec.rating - 1.0) / 4.0


def _lexicon(rec: ReviewRecord) -> float:
    return lexicon_score(rec.text)


def score_reviews(records, scorer="lexicon") -> dict[tuple[str, str], float]:
    """Average interest score per (user, item) pair.

    scorer is "lexicon", "rating-scaled", or any callable mapping a
    record to a value in [0, 1] (the hook for an external model). The
    callable's output is checked against that range.
    """
    if scorer == "lexicon":
        fn = _lexicon
    elif scorer == "rating-scaled":
        fn = _rating_scaled
    elif callable(scorer):
        fn = scorer
    else:
        raise CorpusError(f"unknown scorer {scorer!r}; choose from {', '.join(SCORERS)}")
    buckets: dict[tuple[str, str], list[float]] = {}
    for rec in records:
        value = float(fn(rec))
        if not 0.0 <= value <= 1.0:
            raise CorpusError(
                f"scorer returned {value} for ({rec.user_id}, {rec.item_id}), outside [0, 1]"
            )
        buckets.setdefault((rec.user_id, rec.item_id), []).append(value)
    return {pair: sum(vals) / len(vals) for pair, vals in buckets.items()}
