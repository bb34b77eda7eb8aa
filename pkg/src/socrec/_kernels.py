"""Hot numeric loops, each shipped in two flavors: a numba-jitted version and
a pure-numpy twin.

The jitted path is the default. Set the environment variable
``SOCREC_DISABLE_NUMBA=1`` before import to force the numpy fallback (the
fallback is also selected automatically when numba is not installed). Both
paths compute the same quantities with the same per-edge / per-entry
arithmetic; they may differ only by floating-point accumulation order.

``benchmarks/bench_kernels.py`` times the two paths against each other.
"""

import os

import numpy as np


def _numba_disabled() -> bool:
    flag = os.environ.get("SOCREC_DISABLE_NUMBA", "").strip().lower()
    return flag not in ("", "0", "false", "no")


NUMBA_ENABLED = False
if not _numba_disabled():
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - depends on environment
        NUMBA_ENABLED = False


# --------------------------------------------------------------------------
# pure-numpy implementations
# --------------------------------------------------------------------------

def squared_error_sum_numpy(user_f, item_f, users, items, values):
    """Sum of squared residuals (r - p_u . q_i) over the given entries."""
    pred = np.einsum("ej,ej->e", user_f[users], item_f[items])
    resid = values - pred
    return float(resid @ resid)


def predict_pairs_numpy(user_f, item_f, users, items):
    """Raw inner-product predictions for (user, item) index pairs."""
    return np.einsum("ej,ej->e", user_f[users], item_f[items])


def rating_gradients_numpy(user_f, item_f, users, items, values):
    """Data-term gradients: d_user[u] += err * q_i and d_item[i] += err * p_u."""
    pred = np.einsum("ej,ej->e", user_f[users], item_f[items])
    err = (pred - values)[:, None]
    d_user = np.zeros_like(user_f)
    d_item = np.zeros_like(item_f)
    np.add.at(d_user, users, err * item_f[items])
    np.add.at(d_item, items, err * user_f[users])
    return d_user, d_item


def social_penalty_numpy(user_f, edge_src, edge_dst, edge_sim):
    """Sum over edges of sim * ||p_src - p_dst||^2."""
    diff = user_f[edge_src] - user_f[edge_dst]
    return float(edge_sim @ np.einsum("ej,ej->e", diff, diff))


def social_gradient_numpy(user_f, edge_src, edge_dst, edge_sim, alpha):
    """Gradient of (alpha/2) * sum sim * ||p_src - p_dst||^2.

    Each directed edge contributes alpha*sim*(p_src - p_dst) to the source
    column and the negated vector to the destination column, which covers
    both the out-link and in-link terms of the full derivative.
    """
    out = np.zeros_like(user_f)
    pull = (alpha * edge_sim)[:, None] * (user_f[edge_src] - user_f[edge_dst])
    np.add.at(out, edge_src, pull)
    np.add.at(out, edge_dst, -pull)
    return out


def _overlap_indices(items_a, items_b):
    _, idx_a, idx_b = np.intersect1d(
        items_a, items_b, assume_unique=True, return_indices=True
    )
    return idx_a, idx_b


def vss_edges_numpy(user_ptr, user_items, user_values, edge_src, edge_dst):
    """Cosine similarity over co-rated items, one value per directed edge."""
    out = np.zeros(edge_src.shape[0])
    for e in range(edge_src.shape[0]):
        a, b = edge_src[e], edge_dst[e]
        sa, ea = user_ptr[a], user_ptr[a + 1]
        sb, eb = user_ptr[b], user_ptr[b + 1]
        idx_a, idx_b = _overlap_indices(user_items[sa:ea], user_items[sb:eb])
        if idx_a.size == 0:
            continue
        va = user_values[sa:ea][idx_a]
        vb = user_values[sb:eb][idx_b]
        denom = np.sqrt(va @ va) * np.sqrt(vb @ vb)
        if denom > 0.0:
            out[e] = min(max((va @ vb) / denom, 0.0), 1.0)
    return out


def pcc_edges_numpy(user_ptr, user_items, user_values, user_means, edge_src, edge_dst):
    """Pearson correlation over co-rated items, one value per directed edge.

    Deviations are taken against each user's mean over *all* their rated
    items. Overlaps with fewer than two items, or a zero denominator, give 0.
    """
    out = np.zeros(edge_src.shape[0])
    for e in range(edge_src.shape[0]):
        a, b = edge_src[e], edge_dst[e]
        sa, ea = user_ptr[a], user_ptr[a + 1]
        sb, eb = user_ptr[b], user_ptr[b + 1]
        idx_a, idx_b = _overlap_indices(user_items[sa:ea], user_items[sb:eb])
        if idx_a.size < 2:
            continue
        da = user_values[sa:ea][idx_a] - user_means[a]
        db = user_values[sb:eb][idx_b] - user_means[b]
        denom = np.sqrt(da @ da) * np.sqrt(db @ db)
        if denom > 0.0:
            out[e] = min(max((da @ db) / denom, -1.0), 1.0)
    return out


# --------------------------------------------------------------------------
# loop implementations (compiled by numba when available)
# --------------------------------------------------------------------------

def _squared_error_sum_loops(user_f, item_f, users, items, values):
    k = user_f.shape[1]
    total = 0.0
    for e in range(users.shape[0]):
        u = users[e]
        i = items[e]
        pred = 0.0
        for d in range(k):
            pred += user_f[u, d] * item_f[i, d]
        resid = values[e] - pred
        total += resid * resid
    return total


def _predict_pairs_loops(user_f, item_f, users, items):
    k = user_f.shape[1]
    out = np.empty(users.shape[0])
    for e in range(users.shape[0]):
        u = users[e]
        i = items[e]
        pred = 0.0
        for d in range(k):
            pred += user_f[u, d] * item_f[i, d]
        out[e] = pred
    return out


def _rating_gradients_loops(user_f, item_f, users, items, values):
    k = user_f.shape[1]
    d_user = np.zeros_like(user_f)
    d_item = np.zeros_like(item_f)
    for e in range(users.shape[0]):
        u = users[e]
        i = items[e]
        pred = 0.0
        for d in range(k):
            pred += user_f[u, d] * item_f[i, d]
        err = pred - values[e]
        for d in range(k):
            d_user[u, d] += err * item_f[i, d]
            d_item[i, d] += err * user_f[u, d]
    return d_user, d_item


def _social_penalty_loops(user_f, edge_src, edge_dst, edge_sim):
    k = user_f.shape[1]
    total = 0.0
    for e in range(edge_src.shape[0]):
        s = edge_src[e]
        t = edge_dst[e]
        dist = 0.0
        for d in range(k):
            diff = user_f[s, d] - user_f[t, d]
            dist += diff * diff
        total += edge_sim[e] * dist
    return total


def _social_gradient_loops(user_f, edge_src, edge_dst, edge_sim, alpha):
    k = user_f.shape[1]
    out = np.zeros_like(user_f)
    for e in range(edge_src.shape[0]):
        s = edge_src[e]
        t = edge_dst[e]
        w = alpha * edge_sim[e]
        for d in range(k):
            pull = w * (user_f[s, d] - user_f[t, d])
            out[s, d] += pull
            out[t, d] -= pull
    return out


def _vss_edges_loops(user_ptr, user_items, user_values, edge_src, edge_dst):
    out = np.zeros(edge_src.shape[0])
    for e in range(edge_src.shape[0]):
        a = edge_src[e]
        b = edge_dst[e]
        ia, ea = user_ptr[a], user_ptr[a + 1]
        ib, eb = user_ptr[b], user_ptr[b + 1]
        dot = 0.0
        norm_a = 0.0
        norm_b = 0.0
        while ia < ea and ib < eb:
            if user_items[ia] == user_items[ib]:
                va = user_values[ia]
                vb = user_values[ib]
                dot += va * vb
                norm_a += va * va
                norm_b += vb * vb
                ia += 1
                ib += 1
            elif user_items[ia] < user_items[ib]:
                ia += 1
            else:
                ib += 1
        denom = np.sqrt(norm_a) * np.sqrt(norm_b)
        if denom > 0.0:
            out[e] = min(max(dot / denom, 0.0), 1.0)
    return out


def _pcc_edges_loops(user_ptr, user_items, user_values, user_means, edge_src, edge_dst):
    out = np.zeros(edge_src.shape[0])
    for e in range(edge_src.shape[0]):
        a = edge_src[e]
        b = edge_dst[e]
        ia, ea = user_ptr[a], user_ptr[a + 1]
        ib, eb = user_ptr[b], user_ptr[b + 1]
        mean_a = user_means[a]
        mean_b = user_means[b]
        dot = 0.0
        norm_a = 0.0
        norm_b = 0.0
        overlap = 0
        while ia < ea and ib < eb:
            if user_items[ia] == user_items[ib]:
                da = user_values[ia] - mean_a
                db = user_values[ib] - mean_b
                dot += da * db
                norm_a += da * da
                norm_b += db * db
                overlap += 1
                ia += 1
                ib += 1
            elif user_items[ia] < user_items[ib]:
                ia += 1
            else:
                ib += 1
        if overlap < 2:
            continue
        denom = np.sqrt(norm_a) * np.sqrt(norm_b)
        if denom > 0.0:
            out[e] = min(max(dot / denom, -1.0), 1.0)
    return out


if NUMBA_ENABLED:
    _jit = njit(cache=True)
    squared_error_sum_jit = _jit(_squared_error_sum_loops)
    predict_pairs_jit = _jit(_predict_pairs_loops)
    rating_gradients_jit = _jit(_rating_gradients_loops)
    social_penalty_jit = _jit(_social_penalty_loops)
    social_gradient_jit = _jit(_social_gradient_loops)
    vss_edges_jit = _jit(_vss_edges_loops)
    pcc_edges_jit = _jit(_pcc_edges_loops)

    squared_error_sum = squared_error_sum_jit
    predict_pairs = predict_pairs_jit
    rating_gradients = rating_gradients_jit
    social_penalty = social_penalty_jit
    social_gradient = social_gradient_jit
    vss_edges = vss_edges_jit
    pcc_edges = pcc_edges_jit
else:
    squared_error_sum_jit = None
    predict_pairs_jit = None
    rating_gradients_jit = None
    social_penalty_jit = None
    social_gradient_jit = None
    vss_edges_jit = None
    pcc_edges_jit = None

    squared_error_sum = squared_error_sum_numpy
    predict_pairs = predict_pairs_numpy
    rating_gradients = rating_gradients_numpy
    social_penalty = social_penalty_numpy
    social_gradient = social_gradient_numpy
    vss_edges = vss_edges_numpy
    pcc_edges = pcc_edges_numpy


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return "numba" if NUMBA_ENABLED else "numpy"
