"""Independent brute-force oracles used to cross-check the library.

Everything here is deliberately written with plain Python loops and the
math module so it shares no code path with the package internals.
"""

import math


def brute_objective_basic(user_f, item_f, entries, lam):
    """Naive double loop over entries plus explicit Frobenius sums."""
    total = 0.0
    for u, i, r in entries:
        pred = sum(pu * qi for pu, qi in zip(user_f[u], item_f[i]))
        total += 0.5 * (r - pred) ** 2
    reg = sum(v * v for row in user_f for v in row)
    reg += sum(v * v for row in item_f for v in row)
    return total + 0.5 * lam * reg


def brute_objective_social(user_f, item_f, entries, sim_edges, lam, alpha):
    """Basic objective plus a naive loop over (source, target, sim) edges."""
    total = brute_objective_basic(user_f, item_f, entries, lam)
    for u, f, s in sim_edges:
        dist = sum((a - b) ** 2 for a, b in zip(user_f[u], user_f[f]))
        total += 0.5 * alpha * s * dist
    return total


def brute_pcc(ratings_u, ratings_f):
    """Pearson correlation from item->rating dicts.

    Means are each user's mean over all their rated items; overlaps below
    two items or zero denominators give 0.
    """
    overlap = sorted(set(ratings_u) & set(ratings_f))
    if len(overlap) < 2:
        return 0.0
    mean_u = sum(ratings_u.values()) / len(ratings_u)
    mean_f = sum(ratings_f.values()) / len(ratings_f)
    num = sum((ratings_u[j] - mean_u) * (ratings_f[j] - mean_f) for j in overlap)
    den_u = math.sqrt(sum((ratings_u[j] - mean_u) ** 2 for j in overlap))
    den_f = math.sqrt(sum((ratings_f[j] - mean_f) ** 2 for j in overlap))
    if den_u == 0.0 or den_f == 0.0:
        return 0.0
    return num / (den_u * den_f)


def brute_vss(ratings_u, ratings_f):
    """Cosine over co-rated items from item->rating dicts."""
    overlap = sorted(set(ratings_u) & set(ratings_f))
    if not overlap:
        return 0.0
    num = sum(ratings_u[j] * ratings_f[j] for j in overlap)
    den_u = math.sqrt(sum(ratings_u[j] ** 2 for j in overlap))
    den_f = math.sqrt(sum(ratings_f[j] ** 2 for j in overlap))
    if den_u == 0.0 or den_f == 0.0:
        return 0.0
    return num / (den_u * den_f)


def central_differences(objective, arrays, step=1e-6):
    """Coordinate-wise central finite differences of a scalar function.

    ``arrays`` are mutated in place during probing and restored afterwards;
    one gradient array (a list of lists matching the shape) per input.
    """
    grads = []
    for arr in arrays:
        rows, cols = arr.shape
        grad = [[0.0] * cols for _ in range(rows)]
        for r in range(rows):
            for c in range(cols):
                orig = arr[r, c]
                arr[r, c] = orig + step
                f_plus = objective()
                arr[r, c] = orig - step
                f_minus = objective()
                arr[r, c] = orig
                grad[r][c] = (f_plus - f_minus) / (2.0 * step)
        grads.append(grad)
    return grads
