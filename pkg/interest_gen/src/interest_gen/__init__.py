"""Review corpus in, row-stochastic request matrix CSV out.

Reads JSON-lines review records, scores per-(user, item) interest in
[0, 1] with a deterministic scorer, and writes the user_id,c1..cN CSV
consumed by the downstream resource-allocation solver.
"""

from .records import CorpusError, ReviewRecord, read_reviews
from .scoring import SCORERS, lexicon_score, score_reviews
from .matrix import build_rows, emit_matrix

__all__ = [
    "CorpusError",
    "ReviewRecord",
    "read_reviews",
    "SCORERS",
    "lexicon_score",
    "score_reviews",
    "build_rows",
    "emit_matrix",
]
