"""Sparse ratings storage, trust-graph storage, file ingestion and splitting.

File formats
------------
Ratings: UTF-8 text, one rating per line, ``<user_id> <item_id> <rating>``
separated by spaces or tabs; lines starting with ``#`` are ignored.
Trust: ``<truster_id> <trustee_id>`` per line, same comment rule.
"""

from dataclasses import dataclass

import numpy as np


class DataFileError(ValueError):
    """Malformed or out-of-domain content in a data file."""


class IdMap:
    """Bijective mapping between external user/item ids and dense indices.

    Indices are assigned in first-seen order. Users may be appended after
    construction (trust files can mention users that never rated anything).
    """

    def __init__(self):
        self._user_index: dict[str, int] = {}
        self._item_index: dict[str, int] = {}
        self._user_ids: list[str] = []
        self._item_ids: list[str] = []

    @property
    def num_users(self) -> int:
        return len(self._user_ids)

    @property
    def num_items(self) -> int:
        return len(self._item_ids)

    def add_user(self, user_id: str) -> int:
        idx = self._user_index.get(user_id)
        if idx is None:
            idx = len(self._user_ids)
            self._user_index[user_id] = idx
            self._user_ids.append(user_id)
        return idx

    def add_item(self, item_id: str) -> int:
        idx = self._item_index.get(item_id)
        if idx is None:
            idx = len(self._item_ids)
            self._item_index[item_id] = idx
            self._item_ids.append(item_id)
        return idx

    def user_index(self, user_id: str) -> int:
        return self._user_index[user_id]

    def item_index(self, item_id: str) -> int:
        return self._item_index[item_id]

    def has_user(self, user_id: str) -> bool:
        return user_id in self._user_index

    def has_item(self, item_id: str) -> bool:
        return item_id in self._item_index

    def user_id(self, index: int) -> str:
        return self._user_ids[index]

    def item_id(self, index: int) -> str:
        return self._item_ids[index]


RATING_MIN = 1.0
RATING_MAX = 5.0


class SparseRatings:
    """User-item rating matrix stored as sorted triples with row and column
    indexes.

    Entries are canonically ordered by (user, item). The per-user index
    (``user_ptr``/``items``/``values``) and the per-item index
    (``item_ptr``/``users_by_item``/``values_by_item``) are views over the
    same set of entries. Immutable after construction.
    """

    def __init__(self, num_users, num_items, users, items, values, validate=True):
        users = np.ascontiguousarray(users, dtype=np.int64)
        items = np.ascontiguousarray(items, dtype=np.int64)
        values = np.ascontiguousarray(values, dtype=np.float64)
        if not (users.shape == items.shape == values.shape):
            raise ValueError("users, items and values must have equal length")

        order = np.lexsort((items, users))
        self.users = users[order]
        self.items = items[order]
        self.values = values[order]
        self.num_users = int(num_users)
        self.num_items = int(num_items)

        if validate:
            self._check_invariants()

        self.user_ptr = np.zeros(self.num_users + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.users, minlength=self.num_users), out=self.user_ptr[1:])

        col_order = np.lexsort((self.users, self.items))
        self.users_by_item = self.users[col_order]
        self.values_by_item = self.values[col_order]
        self.item_ptr = np.zeros(self.num_items + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.items, minlength=self.num_items), out=self.item_ptr[1:])

        self._user_means = None

    def _check_invariants(self):
        if self.users.size:
            if self.users.min() < 0 or self.users.max() >= self.num_users:
                raise ValueError("user index out of range")
            if self.items.min() < 0 or self.items.max() >= self.num_items:
                raise ValueError("item index out of range")
            if self.values.min() < RATING_MIN or self.values.max() > RATING_MAX:
                raise ValueError(
                    f"rating outside [{RATING_MIN:g}, {RATING_MAX:g}]"
                )
            same_user = self.users[1:] == self.users[:-1]
            same_item = self.items[1:] == self.items[:-1]
            if np.any(same_user & same_item):
                raise ValueError("duplicate (user, item) entry")

    def __len__(self) -> int:
        return self.users.size

    @property
    def num_entries(self) -> int:
        return self.users.size

    def items_of(self, u):
        """(item indices, ratings) of user u, sorted by item index."""
        lo, hi = self.user_ptr[u], self.user_ptr[u + 1]
        return self.items[lo:hi], self.values[lo:hi]

    def users_of(self, i):
        """(user indices, ratings) of item i, sorted by user index."""
        lo, hi = self.item_ptr[i], self.item_ptr[i + 1]
        return self.users_by_item[lo:hi], self.values_by_item[lo:hi]

    def user_counts(self):
        return np.diff(self.user_ptr)

    def item_counts(self):
        return np.diff(self.item_ptr)

    def user_means(self):
        """Per-user mean rating over all rated items (0.0 for empty users)."""
        if self._user_means is None:
            counts = self.user_counts()
            sums = np.zeros(self.num_users)
            np.add.at(sums, self.users, self.values)
            self._user_means = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
        return self._user_means

    def global_mean(self) -> float:
        if self.values.size == 0:
            raise ValueError("empty ratings have no global mean")
        return float(self.values.mean())

    def with_num_users(self, num_users: int) -> "SparseRatings":
        """Same entries over a wider user index space (extra users rate nothing)."""
        if num_users < self.num_users:
            raise ValueError("cannot shrink the user index space")
        return SparseRatings(
            num_users, self.num_items, self.users, self.items, self.values,
            validate=False,
        )

    def triples(self):
        """Iterate entries as (user, item, rating) in canonical order."""
        for u, i, r in zip(self.users, self.items, self.values):
            yield int(u), int(i), float(r)


class TrustGraph:
    """Directed user-user trust graph with out-link and in-link adjacency.

    Edges are unweighted, deduplicated, free of self-loops, and stored in
    lexicographic (source, destination) order; ``edge_src``/``edge_dst`` is
    simultaneously the flattened out-link CSR. Immutable after construction.
    """

    def __init__(self, num_users, edge_src, edge_dst, validate=True):
        edge_src = np.ascontiguousarray(edge_src, dtype=np.int64)
        edge_dst = np.ascontiguousarray(edge_dst, dtype=np.int64)
        order = np.lexsort((edge_dst, edge_src))
        self.edge_src = edge_src[order]
        self.edge_dst = edge_dst[order]
        self.num_users = int(num_users)

        if validate:
            self._check_invariants()

        self.out_ptr = np.zeros(self.num_users + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.edge_src, minlength=self.num_users), out=self.out_ptr[1:])

        in_order = np.lexsort((self.edge_src, self.edge_dst))
        self.in_src = self.edge_src[in_order]
        self.in_ptr = np.zeros(self.num_users + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.edge_dst, minlength=self.num_users), out=self.in_ptr[1:])

    def _check_invariants(self):
        if self.edge_src.size:
            lo = min(self.edge_src.min(), self.edge_dst.min())
            hi = max(self.edge_src.max(), self.edge_dst.max())
            if lo < 0 or hi >= self.num_users:
                raise ValueError("edge endpoint out of range")
            if np.any(self.edge_src == self.edge_dst):
                raise ValueError("self-loop edge")
            same = (self.edge_src[1:] == self.edge_src[:-1]) & (
                self.edge_dst[1:] == self.edge_dst[:-1]
            )
            if np.any(same):
                raise ValueError("duplicate edge")

    @classmethod
    def from_edges(cls, num_users, edges) -> "TrustGraph":
        """Build from an iterable of (truster, trustee) index pairs.

        Self-loops are dropped and duplicate edges collapsed.
        """
        unique = {(int(s), int(t)) for s, t in edges if int(s) != int(t)}
        if unique:
            src, dst = map(np.array, zip(*sorted(unique)))
        else:
            src = dst = np.empty(0, dtype=np.int64)
        return cls(num_users, src, dst, validate=True)

    @property
    def num_edges(self) -> int:
        return self.edge_src.size

    def out_neighbors(self, u):
        """Users trusted by u, sorted ascending."""
        return self.edge_dst[self.out_ptr[u]:self.out_ptr[u + 1]]

    def in_neighbors(self, u):
        """Users trusting u, sorted ascending."""
        return self.in_src[self.in_ptr[u]:self.in_ptr[u + 1]]

    def out_degrees(self):
        return np.diff(self.out_ptr)

    def edge_position(self, u, f) -> int:
        """Position of edge (u, f) in edge order, or -1 if absent."""
        lo, hi = self.out_ptr[u], self.out_ptr[u + 1]
        pos = lo + np.searchsorted(self.edge_dst[lo:hi], f)
        if pos < hi and self.edge_dst[pos] == f:
            return int(pos)
        return -1


@dataclass
class DatasetSplit:
    """Disjoint train/test partition of a ratings set.

    The train side keeps the full (num_users, num_items) index space; the
    test side is stored as parallel index/value arrays.
    """

    train: SparseRatings
    test_users: np.ndarray
    test_items: np.ndarray
    test_values: np.ndarray
    seed: int
    train_fraction: float

    @property
    def num_test(self) -> int:
        return self.test_users.size

    def test_triples(self):
        for u, i, r in zip(self.test_users, self.test_items, self.test_values):
            yield int(u), int(i), float(r)


def _data_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def load_ratings(path) -> tuple[SparseRatings, IdMap]:
    """Load a ratings file into a dense-indexed sparse matrix.

    Duplicate (user, item) lines keep the last occurrence. Raises
    DataFileError with the offending line number on malformed lines and on
    ratings outside [1, 5].
    """
    ids = IdMap()
    ratings: dict[tuple[int, int], float] = {}
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 3:
            raise DataFileError(
                f"{path}:{lineno}: expected 3 fields, got {len(parts)}"
            )
        try:
            value = float(parts[2])
        except ValueError:
            raise DataFileError(
                f"{path}:{lineno}: non-numeric rating {parts[2]!r}"
            ) from None
        if not (RATING_MIN <= value <= RATING_MAX):
            raise DataFileError(
                f"{path}:{lineno}: rating {value:g} outside [1, 5]"
            )
        u = ids.add_user(parts[0])
        i = ids.add_item(parts[1])
        ratings[(u, i)] = value

    if ratings:
        pairs = np.array(list(ratings.keys()), dtype=np.int64)
        users, items = pairs[:, 0], pairs[:, 1]
        values = np.fromiter(ratings.values(), dtype=np.float64, count=len(ratings))
    else:
        users = items = np.empty(0, dtype=np.int64)
        values = np.empty(0, dtype=np.float64)
    matrix = SparseRatings(ids.num_users, ids.num_items, users, items, values,
                           validate=False)
    return matrix, ids


def save_ratings(ratings: SparseRatings, path, ids: IdMap | None = None):
    """Write a ratings file that round-trips through load_ratings.

    Without an IdMap, dense indices are written as the external ids.
    Ratings use 17 significant digits, enough for exact float64 round-trip.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for u, i, r in zip(ratings.users, ratings.items, ratings.values):
            uid = ids.user_id(u) if ids is not None else str(int(u))
            iid = ids.item_id(i) if ids is not None else str(int(i))
            fh.write(f"{uid}\t{iid}\t{r:.17g}\n")


def load_trust(path, ids: IdMap) -> TrustGraph:
    """Load a trust file as a directed graph over the shared user index space.

    Self-loops are dropped, duplicate edges collapsed. Users that appear only
    in the trust file are appended to the IdMap; align any previously loaded
    ratings with ``ratings.with_num_users(ids.num_users)`` afterwards.
    """
    edges = set()
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise DataFileError(
                f"{path}:{lineno}: expected 2 fields, got {len(parts)}"
            )
        s = ids.add_user(parts[0])
        t = ids.add_user(parts[1])
        if s != t:
            edges.add((s, t))
    return TrustGraph.from_edges(ids.num_users, edges)


def load_dataset(ratings_path, trust_path=None):
    """Load ratings plus optional trust data with aligned user index spaces.

    Returns (ratings, graph, ids); graph is None when no trust path is given.
    """
    ratings, ids = load_ratings(ratings_path)
    graph = None
    if trust_path is not None:
        graph = load_trust(trust_path, ids)
        if ids.num_users > ratings.num_users:
            ratings = ratings.with_num_users(ids.num_users)
    return ratings, graph, ids


def split_ratings(ratings: SparseRatings, train_fraction: float, seed: int) -> DatasetSplit:
    """Uniform entry-level train/test partition, driven solely by the seed."""
    if not (0.0 < train_fraction < 1.0):
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = ratings.num_entries
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_train = int(round(train_fraction * n))
    if n >= 2:
        n_train = min(max(n_train, 1), n - 1)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    train = SparseRatings(
        ratings.num_users, ratings.num_items,
        ratings.users[train_idx], ratings.items[train_idx], ratings.values[train_idx],
        validate=False,
    )
    return DatasetSplit(
        train=train,
        test_users=ratings.users[test_idx],
        test_items=ratings.items[test_idx],
        test_values=ratings.values[test_idx],
        seed=seed,
        train_fraction=train_fraction,
    )


def cold_start_split(ratings: SparseRatings, threshold: int, seed: int = 0) -> DatasetSplit:
    """Hold out one rating per cold-start user (rating count below threshold).

    Every user with 1 <= count < threshold sends exactly one seeded-random
    rating to the test side and the rest to train; all ratings of other
    users go to train. Users with a single rating contribute it to test.
    """
    if threshold < 2:
        raise ValueError(f"threshold must be >= 2, got {threshold}")
    rng = np.random.default_rng(seed)
    counts = ratings.user_counts()
    test_mask = np.zeros(ratings.num_entries, dtype=bool)
    for u in np.nonzero((counts >= 1) & (counts < threshold))[0]:
        lo, hi = ratings.user_ptr[u], ratings.user_ptr[u + 1]
        test_mask[int(rng.integers(lo, hi))] = True
    train_idx = np.nonzero(~test_mask)[0]
    test_idx = np.nonzero(test_mask)[0]
    train = SparseRatings(
        ratings.num_users, ratings.num_items,
        ratings.users[train_idx], ratings.items[train_idx], ratings.values[train_idx],
        validate=False,
    )
    total = max(ratings.num_entries, 1)
    return DatasetSplit(
        train=train,
        test_users=ratings.users[test_idx],
        test_items=ratings.items[test_idx],
        test_values=ratings.values[test_idx],
        seed=seed,
        train_fraction=train_idx.size / total,
    )
