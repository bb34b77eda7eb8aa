"""Bundled toy dataset: 20 users, 15 items, 12 trust edges.

Two fully connected friend triangles (u01-u03 and u04-u06) rate their own
item block identically, so friends have similarity 1 and everyone else 0;
the remaining users rate a disjoint item pool. Regenerate with
``scripts/gen_toydata.py``.
"""

from pathlib import Path

_HERE = Path(__file__).parent


def ratings_path() -> Path:
    return _HERE / "ratings.tsv"


def trust_path() -> Path:
    return _HERE / "trust.tsv"
