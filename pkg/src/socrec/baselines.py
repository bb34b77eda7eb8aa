"""Mean-rating baseline predictors."""

from dataclasses import dataclass

import numpy as np

from .data import SparseRatings


@dataclass
class MeanTable:
    """Per-user and per-item train-rating means with the global fallback.

    Users/items without train ratings carry a zero count; their mean slots
    are placeholders and the global mean is served instead.
    """

    user_means: np.ndarray
    user_counts: np.ndarray
    item_means: np.ndarray
    item_counts: np.ndarray
    global_mean: float


def build_means(train: SparseRatings) -> MeanTable:
    """Arithmetic means over the train entries only."""
    if train.num_entries == 0:
        raise ValueError("cannot build means from an empty train set")
    user_counts = train.user_counts()
    item_counts = train.item_counts()
    user_sums = np.zeros(train.num_users)
    item_sums = np.zeros(train.num_items)
    np.add.at(user_sums, train.users, train.values)
    np.add.at(item_sums, train.items, train.values)
    return MeanTable(
        user_means=user_sums / np.maximum(user_counts, 1),
        user_counts=user_counts,
        item_means=item_sums / np.maximum(item_counts, 1),
        item_counts=item_counts,
        global_mean=train.global_mean(),
    )


def predict_user_mean(table: MeanTable, u, i):
    """User's train mean if present, else the global mean.

    Accepts scalar indices or index arrays; the item index is unused but
    kept so every predictor shares one call shape.
    """
    if np.ndim(u) == 0:
        return float(table.user_means[u]) if table.user_counts[u] > 0 else table.global_mean
    u = np.asarray(u, dtype=np.int64)
    return np.where(table.user_counts[u] > 0, table.user_means[u], table.global_mean)


def predict_item_mean(table: MeanTable, u, i):
    """Item's train mean if present, else the global mean."""
    if np.ndim(i) == 0:
        return float(table.item_means[i]) if table.item_counts[i] > 0 else table.global_mean
    i = np.asarray(i, dtype=np.int64)
    return np.where(table.item_counts[i] > 0, table.item_means[i], table.global_mean)
