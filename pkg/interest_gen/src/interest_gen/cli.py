"""interest-gen command line: review corpus in, matrix CSV out."""

import argparse
import sys

from .matrix import emit_matrix
from .records import CorpusError, read_reviews
from .scoring import SCORERS, score_reviews

EXIT_OK = 0
EXIT_INPUT = 1


def _id_list(arg: str, what: str) -> list[str]:
    parts = [p for p in arg.split(",") if p]
    if not parts:
        raise CorpusError(f"{what}: empty list")
    return parts


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="interest-gen",
        description="Turn a JSON-lines review corpus into a row-stochastic request matrix CSV.",
    )
    parser.add_argument("--input", required=True, help="reviews JSONL file")
    parser.add_argument("--scorer", default="lexicon", choices=SCORERS)
    parser.add_argument("--users", required=True, help="comma-separated user ids, row order")
    parser.add_argument("--items", required=True, help="comma-separated item ids, column order")
    parser.add_argument("--out", required=True, help="output CSV path, - for stdout")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        users = _id_list(args.users, "users")
        items = _id_list(args.items, "items")
        records = read_reviews(args.input)
        scores = score_reviews(records, args.scorer)
        if args.out == "-":
            emit_matrix(scores, users, items, sys.stdout)
        else:
            emit_matrix(scores, users, items, args.out)
            print(f"wrote {len(users)}x{len(items)} matrix to {args.out}")
    except (CorpusError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
