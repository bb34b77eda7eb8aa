"""Shared builders for random test instances."""

import numpy as np

from socrec import FactorModel, SimilarityTable, SparseRatings, TrustGraph


def random_ratings(rng, num_users, num_items, per_user=None):
    """Every user rates a random nonempty item subset with ratings in [1, 5]."""
    users, items, values = [], [], []
    for u in range(num_users):
        count = per_user or int(rng.integers(1, num_items + 1))
        rated = rng.choice(num_items, size=min(count, num_items), replace=False)
        for i in rated:
            users.append(u)
            items.append(int(i))
            values.append(float(rng.uniform(1.0, 5.0)))
    return SparseRatings(num_users, num_items, users, items, values)


def random_graph(rng, num_users, edge_prob=0.3):
    edges = [
        (u, v)
        for u in range(num_users)
        for v in range(num_users)
        if u != v and rng.random() < edge_prob
    ]
    return TrustGraph.from_edges(num_users, edges)


def random_sim(rng, graph):
    return SimilarityTable(graph, rng.uniform(0.0, 1.0, graph.num_edges))


def random_model(rng, num_users, num_items, k, scale=1.0):
    return FactorModel(
        user_factors=rng.uniform(0.0, scale, (num_users, k)),
        item_factors=rng.uniform(0.0, scale, (num_items, k)),
        k=k,
    )


def sim_edge_triples(graph, sim):
    """(source, target, sim) triples for feeding the brute-force oracles."""
    return [
        (int(s), int(t), float(v))
        for s, t, v in zip(graph.edge_src, graph.edge_dst, sim.values)
    ]


def entry_triples(ratings):
    return list(ratings.triples())
