import json
import pathlib

import pytest

from interest_gen.records import read_reviews

DATA = pathlib.Path(__file__).parent / "data"

USERS = ["alice", "bob", "carol", "dave", "erin"]
ITEMS = ["atlantis-dive", "lunar-base", "coral-reef", "city-flyover"]


@pytest.fixture(scope="session")
def corpus_path():
    return DATA / "reviews.jsonl"


@pytest.fixture(scope="session")
def corpus(corpus_path):
    return read_reviews(corpus_path)


@pytest.fixture(scope="session")
def golden_scores():
    with open(DATA / "golden_scores.json") as fh:
        nested = json.load(fh)
    return {(u, i): v for u, items in nested.items() for i, v in items.items()}
