"""User-user similarity measures evaluated on training ratings and
materialized once per trust edge.

Four kinds are supported: Pearson correlation (mapped from [-1, 1] into
[0, 1]), cosine similarity over co-rated items, a constant 1 per edge, and
a seeded uniform random value per edge.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .data import SparseRatings, TrustGraph

KINDS = ("pcc", "vss", "constant", "random")


@dataclass(frozen=True)
class SimilarityKind:
    """Similarity selector; ``seed`` only matters for the random kind."""

    tag: str
    seed: int = 0

    def __post_init__(self):
        if self.tag not in KINDS:
            raise ValueError(f"unknown similarity kind {self.tag!r}; choose from {KINDS}")

    @classmethod
    def pcc(cls) -> "SimilarityKind":
        return cls("pcc")

    @classmethod
    def vss(cls) -> "SimilarityKind":
        return cls("vss")

    @classmethod
    def constant(cls) -> "SimilarityKind":
        return cls("constant")

    @classmethod
    def random(cls, seed: int = 0) -> "SimilarityKind":
        return cls("random", seed)

    @classmethod
    def parse(cls, text: str) -> "SimilarityKind":
        """Parse 'pcc' | 'vss' | 'constant' | 'random[:seed]'."""
        tag, _, seed = text.strip().lower().partition(":")
        if seed:
            return cls(tag, int(seed))
        return cls(tag)

    def label(self) -> str:
        return f"{self.tag}:{self.seed}" if self.tag == "random" else self.tag


class SimilarityTable:
    """One similarity value in [0, 1] per directed trust edge.

    Values are stored in the graph's canonical edge order, so the table is
    keyed exactly by the graph's edge set. Immutable after construction.
    """

    def __init__(self, graph: TrustGraph, values):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.shape != graph.edge_src.shape:
            raise ValueError("one similarity value per edge required")
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise ValueError("similarity values must lie in [0, 1]")
        self.graph = graph
        self.values = values

    def __len__(self) -> int:
        return self.values.size

    def value(self, u: int, f: int) -> float:
        """Similarity stored on edge (u, f); KeyError if the edge is absent."""
        pos = self.graph.edge_position(u, f)
        if pos < 0:
            raise KeyError(f"no trust edge {u} -> {f}")
        return float(self.values[pos])

    def save(self, path):
        """Write '<u> <f> <sim>' lines, 17 significant digits per value."""
        with open(path, "w", encoding="utf-8") as fh:
            for s, t, v in zip(self.graph.edge_src, self.graph.edge_dst, self.values):
                fh.write(f"{s} {t} {v:.17g}\n")


def load_similarity_table(path, graph: TrustGraph) -> SimilarityTable:
    """Read a cached table and check it is keyed by exactly the graph's edges."""
    entries = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 fields")
            entries[(int(parts[0]), int(parts[1]))] = float(parts[2])
    if len(entries) != graph.num_edges:
        raise ValueError(
            f"cache holds {len(entries)} edges, graph has {graph.num_edges}"
        )
    values = np.empty(graph.num_edges)
    for pos, (s, t) in enumerate(zip(graph.edge_src, graph.edge_dst)):
        key = (int(s), int(t))
        if key not in entries:
            raise ValueError(f"cache is missing edge {key}")
        values[pos] = entries[key]
    return SimilarityTable(graph, values)


def map_to_unit(x: float) -> float:
    """Affine map from [-1, 1] onto [0, 1]."""
    return (x + 1.0) / 2.0


def _single_edge(u, f):
    return (np.array([u], dtype=np.int64), np.array([f], dtype=np.int64))


def pcc(ratings: SparseRatings, u: int, f: int) -> float:
    """Pearson correlation between two users over their co-rated items.

    Deviations use each user's mean over all their rated items. Returns 0
    when the overlap has fewer than two items or a denominator vanishes.
    """
    src, dst = _single_edge(u, f)
    out = _kernels.pcc_edges(
        ratings.user_ptr, ratings.items, ratings.values, ratings.user_means(),
        src, dst,
    )
    return float(out[0])


def vss(ratings: SparseRatings, u: int, f: int) -> float:
    """Cosine similarity between two users over their co-rated items.

    Returns 0 on empty overlap or a zero denominator.
    """
    src, dst = _single_edge(u, f)
    out = _kernels.vss_edges(
        ratings.user_ptr, ratings.items, ratings.values, src, dst,
    )
    return float(out[0])


def build_similarity_table(
    ratings: SparseRatings, graph: TrustGraph, kind: SimilarityKind
) -> SimilarityTable:
    """Materialize one similarity value per directed trust edge.

    Build the table from the *training* ratings only; computing it on the
    full matrix would leak test information into the regularizer.
    """
    if ratings.num_users != graph.num_users:
        raise ValueError(
            f"ratings cover {ratings.num_users} users, graph {graph.num_users}"
        )
    if kind.tag == "constant":
        values = np.ones(graph.num_edges)
    elif kind.tag == "random":
        rng = np.random.default_rng(kind.seed)
        values = rng.uniform(0.0, 1.0, graph.num_edges)
    elif kind.tag == "vss":
        values = _kernels.vss_edges(
            ratings.user_ptr, ratings.items, ratings.values,
            graph.edge_src, graph.edge_dst,
        )
    else:
        raw = _kernels.pcc_edges(
            ratings.user_ptr, ratings.items, ratings.values, ratings.user_means(),
            graph.edge_src, graph.edge_dst,
        )
        values = (raw + 1.0) / 2.0
    return SimilarityTable(graph, values)
