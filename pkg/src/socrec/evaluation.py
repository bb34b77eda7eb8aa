"""Metrics and experiment orchestration: method comparisons over repeated
splits, alpha-sensitivity sweeps, similarity ablations, cold-start runs,
and the friends-vs-random-peers similarity analysis.

Every experiment cell is deterministic given its seed; results can be
written as CSV (one row per variant and seed, plus a summary file with
means and paired t-test p-values).
"""

import logging
from dataclasses import asdict, dataclass, replace
from datetime import datetime, timezone
from functools import partial

import numpy as np

from . import _kernels
from .baselines import build_means, predict_item_mean, predict_user_mean
from .data import (
    RATING_MAX,
    RATING_MIN,
    DatasetSplit,
    SparseRatings,
    TrustGraph,
    cold_start_split,
    split_ratings,
)
from .factorization import Hyperparams, train
from .similarity import SimilarityKind, build_similarity_table

logger = logging.getLogger(__name__)

METHODS = ("user_mean", "item_mean", "basic_mf", "social_mf")
DEFAULT_SEEDS = (1, 2, 3, 4, 5)
DEFAULT_ALPHAS = (0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0)


@dataclass(frozen=True)
class MetricPair:
    """Mean absolute error and root mean squared error of one evaluation."""

    mae: float
    rmse: float


@dataclass
class ExperimentResult:
    """Per-seed metrics of one method under one train fraction."""

    method: str
    train_fraction: float
    seeds: tuple
    per_seed: list  # MetricPair per seed, aligned with seeds
    hyperparams: dict

    @property
    def mean(self) -> MetricPair:
        return MetricPair(
            mae=float(np.mean([m.mae for m in self.per_seed])),
            rmse=float(np.mean([m.rmse for m in self.per_seed])),
        )


@dataclass
class SimilarityStudyResult:
    """Friends-vs-random-peers similarity comparison.

    For each qualifying user (out-degree strictly above ``min_out_degree``)
    holds the mean similarity to out-link friends and to an equally sized,
    disjoint random peer set. ``fraction_positive`` is the share of
    qualifying users whose friend mean strictly exceeds the random mean.
    """

    user_indices: np.ndarray
    friend_sim_means: np.ndarray
    random_sim_means: np.ndarray
    fraction_positive: float
    min_out_degree: int
    seed: int
    skipped_users: list


def mae_rmse(pairs) -> MetricPair:
    """Metrics from raw (truth, prediction) pairs, no clamping applied."""
    arr = np.asarray(list(pairs), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot compute metrics on an empty list")
    resid = arr[:, 0] - arr[:, 1]
    return MetricPair(
        mae=float(np.mean(np.abs(resid))),
        rmse=float(np.sqrt(np.mean(resid * resid))),
    )


def _test_arrays(test):
    if isinstance(test, DatasetSplit):
        return test.test_users, test.test_items, test.test_values
    if isinstance(test, tuple) and len(test) == 3 and np.ndim(test[0]) == 1:
        users, items, values = test
        return (
            np.asarray(users, dtype=np.int64),
            np.asarray(items, dtype=np.int64),
            np.asarray(values, dtype=np.float64),
        )
    rows = np.asarray(list(test), dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != 3:
        raise ValueError("test must be (u, i, r) triples or a DatasetSplit")
    return rows[:, 0].astype(np.int64), rows[:, 1].astype(np.int64), rows[:, 2]


def _predict_batch(predictor, users, items):
    fn = predictor.predict if hasattr(predictor, "predict") else predictor
    try:
        out = np.asarray(fn(users, items), dtype=np.float64)
        if out.shape != users.shape:
            raise ValueError
    except (TypeError, ValueError, IndexError):
        out = np.fromiter(
            (float(fn(int(u), int(i))) for u, i in zip(users, items)),
            dtype=np.float64,
            count=users.size,
        )
    return out


def evaluate(predictor, test, train: SparseRatings) -> MetricPair:
    """Clamped test-set metrics for any predictor.

    The predictor is an object with ``predict(u, i)`` or a plain callable;
    vectorized index arrays are used when supported. Predictions on users
    or items with no train ratings fall back to the global train mean (the
    same rule for every method), and all predictions are clamped to the
    rating range before residuals are taken.
    """
    users, items, truths = _test_arrays(test)
    if users.size == 0:
        raise ValueError("cannot evaluate on an empty test set")
    preds = _predict_batch(predictor, users, items)
    seen_user = train.user_counts() > 0
    seen_item = train.item_counts() > 0
    covered = seen_user[users] & seen_item[items]
    preds = np.where(covered, preds, train.global_mean())
    preds = np.clip(preds, RATING_MIN, RATING_MAX)
    resid = truths - preds
    return MetricPair(
        mae=float(np.mean(np.abs(resid))),
        rmse=float(np.sqrt(np.mean(resid * resid))),
    )


def _fit_and_score(split, graph, sim_kind, hp, methods):
    """Train/evaluate the requested methods on one split. Returns
    {method: MetricPair}."""
    scores = {}
    train_set = split.train
    if "user_mean" in methods or "item_mean" in methods:
        means = build_means(train_set)
        if "user_mean" in methods:
            scores["user_mean"] = evaluate(partial(predict_user_mean, means), split, train_set)
        if "item_mean" in methods:
            scores["item_mean"] = evaluate(partial(predict_item_mean, means), split, train_set)
    if "basic_mf" in methods:
        model, _ = train(train_set, hp)
        scores["basic_mf"] = evaluate(model, split, train_set)
    if "social_mf" in methods:
        if graph is None:
            raise ValueError("social_mf requires a trust graph")
        sim = build_similarity_table(train_set, graph, sim_kind)
        model, _ = train(train_set, hp, graph, sim)
        scores["social_mf"] = evaluate(model, split, train_set)
    return scores


def run_comparison(
    ratings: SparseRatings,
    graph: TrustGraph,
    fractions,
    seeds,
    hp: Hyperparams,
    sim_kind: SimilarityKind = SimilarityKind.pcc(),
) -> list:
    """Split x seed sweep of all four methods; per-split PCC similarity.

    Each (fraction, seed) cell re-splits the data, rebuilds the similarity
    table from the train side and retrains; results are aggregated per
    method and fraction.
    """
    if not fractions or not seeds:
        raise ValueError("need at least one fraction and one seed")
    results = []
    for fraction in fractions:
        per_method = {m: [] for m in METHODS}
        for seed in seeds:
            split = split_ratings(ratings, fraction, seed)
            cell = _fit_and_score(split, graph, sim_kind, hp.with_seed(seed), METHODS)
            for method, pair in cell.items():
                per_method[method].append(pair)
            logger.info("comparison fraction=%s seed=%s done", fraction, seed)
        for method in METHODS:
            results.append(ExperimentResult(
                method=method,
                train_fraction=fraction,
                seeds=tuple(seeds),
                per_seed=per_method[method],
                hyperparams=asdict(hp),
            ))
    return results


def run_alpha_sweep(
    ratings: SparseRatings,
    graph: TrustGraph,
    alphas,
    hp: Hyperparams,
    train_fraction: float = 0.9,
    seed: int = 1,
    sim_kind: SimilarityKind = SimilarityKind.pcc(),
) -> list:
    """Metrics of the social model across social-weight values.

    One full train/evaluate per value; split, seed and similarity table are
    held fixed, so the zero point coincides exactly with the basic model.
    """
    if not alphas:
        raise ValueError("need at least one alpha")
    split = split_ratings(ratings, train_fraction, seed)
    sim = build_similarity_table(split.train, graph, sim_kind)
    out = []
    for alpha in alphas:
        hp_a = replace(hp, alpha=float(alpha), seed=seed)
        model, _ = train(split.train, hp_a, graph, sim)
        out.append((float(alpha), evaluate(model, split, split.train)))
        logger.info("alpha sweep alpha=%s done", alpha)
    return out


def run_similarity_ablation(
    ratings: SparseRatings,
    graph: TrustGraph,
    kinds,
    hp: Hyperparams,
    train_fraction: float = 0.9,
    seed: int = 1,
) -> list:
    """Social model under different similarity kinds, all else held fixed."""
    if not kinds:
        raise ValueError("need at least one similarity kind")
    split = split_ratings(ratings, train_fraction, seed)
    hp_run = hp.with_seed(seed)
    out = []
    for kind in kinds:
        sim = build_similarity_table(split.train, graph, kind)
        model, _ = train(split.train, hp_run, graph, sim)
        out.append((kind, evaluate(model, split, split.train)))
        logger.info("ablation kind=%s done", kind.label())
    return out


def run_cold_start(
    ratings: SparseRatings,
    graph: TrustGraph,
    threshold: int,
    hp: Hyperparams,
    seeds=DEFAULT_SEEDS,
    sim_kind: SimilarityKind = SimilarityKind.pcc(),
) -> list:
    """All four methods evaluated on the cold-start held-out ratings only.

    Users below the rating-count threshold each hold out one rating; all
    other ratings stay in train. Returns an empty list (with a logged
    notice) when the data has no cold-start users.
    """
    if threshold < 2:
        raise ValueError(f"threshold must be >= 2, got {threshold}")
    counts = ratings.user_counts()
    if not np.any((counts >= 1) & (counts < threshold)):
        logger.warning("no cold-start users below threshold %d; nothing to do", threshold)
        return []
    per_method = {m: [] for m in METHODS}
    for seed in seeds:
        split = cold_start_split(ratings, threshold, seed)
        cell = _fit_and_score(split, graph, sim_kind, hp.with_seed(seed), METHODS)
        for method, pair in cell.items():
            per_method[method].append(pair)
        logger.info("cold-start seed=%s done", seed)
    return [
        ExperimentResult(
            method=method,
            train_fraction=float("nan"),
            seeds=tuple(seeds),
            per_seed=per_method[method],
            hyperparams=asdict(hp),
        )
        for method in METHODS
    ]


def run_similarity_study(
    ratings: SparseRatings,
    graph: TrustGraph,
    min_out_degree: int = 5,
    seed: int = 0,
    kind: str = "vss",
) -> SimilarityStudyResult:
    """Compare mean similarity to trusted friends against random peers.

    For every user whose out-degree strictly exceeds ``min_out_degree``,
    draws a random peer set of the same size (disjoint from the friend set,
    excluding the user) and averages the pairwise similarity to both sets.
    Users without enough eligible peers are skipped with a notice.
    """
    if min_out_degree < 1:
        raise ValueError(f"min_out_degree must be >= 1, got {min_out_degree}")
    if kind not in ("vss", "pcc"):
        raise ValueError("similarity study supports 'vss' or 'pcc'")
    rng = np.random.default_rng(seed)
    all_users = np.arange(graph.num_users, dtype=np.int64)
    degrees = graph.out_degrees()
    user_means = ratings.user_means() if kind == "pcc" else None

    def pair_sims(center, others):
        src = np.full(others.size, center, dtype=np.int64)
        if kind == "vss":
            return _kernels.vss_edges(
                ratings.user_ptr, ratings.items, ratings.values, src, others
            )
        raw = _kernels.pcc_edges(
            ratings.user_ptr, ratings.items, ratings.values, user_means, src, others
        )
        return (raw + 1.0) / 2.0

    kept, friend_means, random_means, skipped = [], [], [], []
    for u in np.nonzero(degrees > min_out_degree)[0]:
        friends = graph.out_neighbors(u)
        excluded = np.concatenate((friends, [u]))
        eligible = np.setdiff1d(all_users, excluded, assume_unique=False)
        if eligible.size < friends.size:
            skipped.append(int(u))
            continue
        peers = rng.choice(eligible, size=friends.size, replace=False)
        kept.append(int(u))
        friend_means.append(float(pair_sims(u, friends).mean()))
        random_means.append(float(pair_sims(u, peers).mean()))
    if skipped:
        logger.warning(
            "similarity study skipped %d users with too few eligible peers", len(skipped)
        )

    friend_arr = np.asarray(friend_means)
    random_arr = np.asarray(random_means)
    fraction = float(np.mean(friend_arr > random_arr)) if friend_arr.size else 0.0
    return SimilarityStudyResult(
        user_indices=np.asarray(kept, dtype=np.int64),
        friend_sim_means=friend_arr,
        random_sim_means=random_arr,
        fraction_positive=fraction,
        min_out_degree=min_out_degree,
        seed=seed,
        skipped_users=skipped,
    )


# --------------------------------------------------------------------------
# statistics and CSV output
# --------------------------------------------------------------------------

def paired_t_pvalue(sample_a, sample_b):
    """Two-sided paired t-test p-value, or None when undefined."""
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size < 2 or a.size != b.size:
        return None
    from scipy.stats import ttest_rel

    p = float(ttest_rel(a, b).pvalue)
    return None if np.isnan(p) else p


def _timestamp_header(experiment):
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return f"# socrec {experiment} generated {stamp}\n"


def write_rows_csv(path, experiment, rows):
    """Rows of (variant, seed, train_fraction, MetricPair), one CSV line each."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_timestamp_header(experiment))
        fh.write("experiment,variant,seed,train_fraction,mae,rmse\n")
        for variant, seed, fraction, pair in rows:
            fh.write(
                f"{experiment},{variant},{seed},{fraction:.10g},"
                f"{pair.mae:.10g},{pair.rmse:.10g}\n"
            )


def write_summary_csv(path, experiment, rows):
    """Rows of (variant, train_fraction, mae, rmse, p_mae, p_rmse)."""

    def fmt_p(p):
        return f"{p:.6g}" if p is not None else ""

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_timestamp_header(experiment))
        fh.write("experiment,variant,train_fraction,mae,rmse,p_mae,p_rmse\n")
        for variant, fraction, mae, rmse, p_mae, p_rmse in rows:
            fh.write(
                f"{experiment},{variant},{fraction:.10g},{mae:.10g},{rmse:.10g},"
                f"{fmt_p(p_mae)},{fmt_p(p_rmse)}\n"
            )


def write_metric_column_csv(path, experiment, column, pairs):
    """Two-column CSV (e.g. alpha,mae) for external plotting."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_timestamp_header(experiment))
        fh.write(f"alpha,{column}\n")
        for alpha, value in pairs:
            fh.write(f"{alpha:.10g},{value:.10g}\n")


def comparison_summary(results):
    """Summary rows with paired t-test p-values against the social model."""
    rows = []
    # keyed on repr so the NaN fraction of cold-start runs still matches
    social = {
        repr(r.train_fraction): r for r in results if r.method == "social_mf"
    }
    for r in results:
        ref = social.get(repr(r.train_fraction))
        if ref is None or r.method == "social_mf":
            p_mae = p_rmse = None
        else:
            p_mae = paired_t_pvalue(
                [m.mae for m in r.per_seed], [m.mae for m in ref.per_seed]
            )
            p_rmse = paired_t_pvalue(
                [m.rmse for m in r.per_seed], [m.rmse for m in ref.per_seed]
            )
        mean = r.mean
        rows.append((r.method, r.train_fraction, mean.mae, mean.rmse, p_mae, p_rmse))
    return rows
