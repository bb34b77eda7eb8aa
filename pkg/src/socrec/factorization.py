"""Latent-factor optimization core.

Two objectives share one trainer: plain L2-regularized matrix factorization,
and the social variant that adds a smoothness penalty pulling each user's
factor toward the factors of the users they trust, weighted by similarity.
Training is full-batch gradient descent with a constant learning rate; runs
are fully deterministic given (seed, hyperparameters, data).

Factors are stored row-per-user / row-per-item (shape (M, K) and (N, K));
each row is one latent column vector of the factor matrices.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .data import DataFileError, SparseRatings, TrustGraph
from .similarity import SimilarityTable


class DivergenceError(RuntimeError):
    """Training produced non-finite factors (learning rate too high)."""

    def __init__(self, epoch: int):
        super().__init__(
            f"non-finite factors at epoch {epoch}; lower the learning rate"
        )
        self.epoch = epoch


@dataclass(frozen=True)
class Hyperparams:
    """Training settings; defaults follow the reproduction configuration."""

    k: int = 10
    lam: float = 3.0
    alpha: float = 0.01
    learning_rate: float = 0.001
    max_epochs: int = 300
    tolerance: float = 1e-5
    init_scale: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        if self.init_scale < 0:
            raise ValueError(f"init_scale must be >= 0, got {self.init_scale}")

    def with_seed(self, seed: int) -> "Hyperparams":
        return replace(self, seed=seed)


@dataclass
class FactorModel:
    """User and item latent factors plus the training-set mean rating."""

    user_factors: np.ndarray  # (num_users, k)
    item_factors: np.ndarray  # (num_items, k)
    k: int
    global_mean: float = 0.0

    @property
    def num_users(self) -> int:
        return self.user_factors.shape[0]

    @property
    def num_items(self) -> int:
        return self.item_factors.shape[0]

    def predict(self, u, i):
        return predict(self, u, i)


@dataclass
class TrainReport:
    """Objective trajectory of one training run."""

    objective_per_epoch: list[float] = field(default_factory=list)
    epochs_run: int = 0
    converged: bool = False


def init_model(num_users: int, num_items: int, hp: Hyperparams) -> FactorModel:
    """Seeded factor initialization, entries i.i.d. uniform on [0, init_scale]."""
    if num_users < 1 or num_items < 1:
        raise ValueError("need at least one user and one item")
    rng = np.random.default_rng(hp.seed)
    user_f = rng.uniform(0.0, hp.init_scale, size=(num_users, hp.k))
    item_f = rng.uniform(0.0, hp.init_scale, size=(num_items, hp.k))
    return FactorModel(user_f, item_f, hp.k)


def predict(model: FactorModel, u, i):
    """Raw inner-product prediction, unclamped (clamping happens at
    evaluation time). Accepts scalars or index arrays."""
    if np.ndim(u) == 0 and np.ndim(i) == 0:
        return float(model.user_factors[u] @ model.item_factors[i])
    users = np.asarray(u, dtype=np.int64)
    items = np.asarray(i, dtype=np.int64)
    return _kernels.predict_pairs(
        model.user_factors, model.item_factors, users, items
    )


def _l2_penalty(model: FactorModel, lam: float) -> float:
    if lam == 0.0:
        return 0.0
    uf, it = model.user_factors, model.item_factors
    return 0.5 * lam * (float(np.sum(uf * uf)) + float(np.sum(it * it)))


def objective_basic(model: FactorModel, train: SparseRatings, hp: Hyperparams) -> float:
    """Half the squared rating error plus the L2 penalty on both factor sets."""
    sse = _kernels.squared_error_sum(
        model.user_factors, model.item_factors,
        train.users, train.items, train.values,
    )
    return 0.5 * sse + _l2_penalty(model, hp.lam)


def objective_social(
    model: FactorModel,
    train: SparseRatings,
    graph: TrustGraph,
    sim: SimilarityTable,
    hp: Hyperparams,
) -> float:
    """Basic objective plus the similarity-weighted factor smoothness penalty
    over out-link edges."""
    value = objective_basic(model, train, hp)
    if hp.alpha != 0.0 and graph.num_edges > 0:
        value += 0.5 * hp.alpha * _kernels.social_penalty(
            model.user_factors, graph.edge_src, graph.edge_dst, sim.values
        )
    return value


def gradients_social(
    model: FactorModel,
    train: SparseRatings,
    graph: TrustGraph,
    sim: SimilarityTable,
    hp: Hyperparams,
):
    """Analytic gradients of the social objective.

    Returns (d_user, d_item) with the factor array shapes. Each trust edge
    (u, f) with similarity s contributes alpha*s*(p_u - p_f) to the source
    row and alpha*s*(p_f - p_u) to the destination row, i.e. the out-link
    and in-link terms of the derivative; the in-link term reads the
    similarity stored on the existing edge.
    """
    d_user, d_item = _kernels.rating_gradients(
        model.user_factors, model.item_factors,
        train.users, train.items, train.values,
    )
    if hp.lam != 0.0:
        d_user += hp.lam * model.user_factors
        d_item += hp.lam * model.item_factors
    if graph is not None and hp.alpha != 0.0 and graph.num_edges > 0:
        d_user += _kernels.social_gradient(
            model.user_factors, graph.edge_src, graph.edge_dst,
            sim.values, hp.alpha,
        )
    return d_user, d_item


def train(
    ratings: SparseRatings,
    hp: Hyperparams,
    graph: TrustGraph | None = None,
    sim: SimilarityTable | None = None,
) -> tuple[FactorModel, TrainReport]:
    """Fit factors by full-batch gradient descent.

    Pass graph and sim together for the social variant, or neither for the
    basic one. Stops when the relative objective change drops below
    hp.tolerance or after hp.max_epochs epochs. Raises DivergenceError if
    factors or the objective leave the finite range.
    """
    if (graph is None) != (sim is None):
        raise ValueError("graph and sim must be supplied together or not at all")
    if graph is not None and graph.num_users != ratings.num_users:
        raise ValueError("graph and ratings must share the user index space")
    if ratings.num_entries == 0:
        raise ValueError("cannot train on an empty ratings set")

    model = init_model(ratings.num_users, ratings.num_items, hp)
    model.global_mean = ratings.global_mean()

    def objective() -> float:
        if graph is None:
            return objective_basic(model, ratings, hp)
        return objective_social(model, ratings, graph, sim, hp)

    report = TrainReport()
    previous = objective()
    eta = hp.learning_rate
    # overflow to inf/nan is detected and raised as DivergenceError below
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, hp.max_epochs + 1):
            d_user, d_item = gradients_social(model, ratings, graph, sim, hp)
            model.user_factors -= eta * d_user
            model.item_factors -= eta * d_item
            if not (np.isfinite(model.user_factors).all()
                    and np.isfinite(model.item_factors).all()):
                raise DivergenceError(epoch)
            current = objective()
            if not np.isfinite(current):
                raise DivergenceError(epoch)
            report.objective_per_epoch.append(current)
            report.epochs_run = epoch
            if abs(current - previous) / max(1.0, previous) < hp.tolerance:
                report.converged = True
                break
            previous = current
    return model, report


MODEL_HEADER = "SOCREC-MODEL v1"


def save_model(model: FactorModel, path):
    """Write the text model format: header, user rows, item rows, mean.

    Values carry 17 significant digits for exact float64 round-trips.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{MODEL_HEADER} {model.k} {model.num_users} {model.num_items}\n")
        for row in model.user_factors:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
        for row in model.item_factors:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
        fh.write(f"{model.global_mean:.17g}\n")


def load_model(path) -> FactorModel:
    """Parse a saved model; raises DataFileError on any format violation."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DataFileError(f"{path}: empty model file")
    head = lines[0].split()
    if len(head) != 5 or " ".join(head[:2]) != MODEL_HEADER:
        raise DataFileError(f"{path}:1: bad model header")
    try:
        k, m, n = (int(x) for x in head[2:])
    except ValueError:
        raise DataFileError(f"{path}:1: bad model dimensions") from None
    if k < 1 or m < 1 or n < 1 or len(lines) != 1 + m + n + 1:
        raise DataFileError(f"{path}: model body does not match header")

    def parse_rows(rows, count, offset):
        out = np.empty((count, k))
        for r, line in enumerate(rows):
            parts = line.split()
            if len(parts) != k:
                raise DataFileError(f"{path}:{offset + r}: expected {k} values")
            try:
                out[r] = [float(p) for p in parts]
            except ValueError:
                raise DataFileError(f"{path}:{offset + r}: non-numeric factor") from None
        return out

    user_f = parse_rows(lines[1:1 + m], m, 2)
    item_f = parse_rows(lines[1 + m:1 + m + n], n, 2 + m)
    try:
        mean = float(lines[1 + m + n])
    except ValueError:
        raise DataFileError(f"{path}:{2 + m + n}: non-numeric global mean") from None
    return FactorModel(user_f, item_f, k, mean)
