"""The jitted kernels and their pure-numpy twins must agree numerically."""

import os
import subprocess
import sys

import numpy as np
import pytest

from socrec import _kernels

from helpers import random_graph, random_ratings, random_sim

needs_numba = pytest.mark.skipif(
    not _kernels.NUMBA_ENABLED, reason="numba backend not active"
)


@pytest.fixture(scope="module")
def instance():
    rng = np.random.default_rng(60)
    ratings = random_ratings(rng, 40, 20)
    graph = random_graph(rng, 40, edge_prob=0.1)
    sim = random_sim(rng, graph)
    user_f = rng.uniform(0, 1, (40, 6))
    item_f = rng.uniform(0, 1, (20, 6))
    return ratings, graph, sim, user_f, item_f


@needs_numba
class TestTwinAgreement:
    def test_squared_error_sum(self, instance):
        ratings, _, _, user_f, item_f = instance
        args = (user_f, item_f, ratings.users, ratings.items, ratings.values)
        assert _kernels.squared_error_sum_jit(*args) == pytest.approx(
            _kernels.squared_error_sum_numpy(*args), rel=1e-12
        )

    def test_predict_pairs(self, instance):
        ratings, _, _, user_f, item_f = instance
        args = (user_f, item_f, ratings.users, ratings.items)
        np.testing.assert_allclose(
            _kernels.predict_pairs_jit(*args),
            _kernels.predict_pairs_numpy(*args),
            rtol=1e-13,
        )

    def test_rating_gradients(self, instance):
        ratings, _, _, user_f, item_f = instance
        args = (user_f, item_f, ratings.users, ratings.items, ratings.values)
        du_j, di_j = _kernels.rating_gradients_jit(*args)
        du_n, di_n = _kernels.rating_gradients_numpy(*args)
        np.testing.assert_allclose(du_j, du_n, rtol=1e-11, atol=1e-13)
        np.testing.assert_allclose(di_j, di_n, rtol=1e-11, atol=1e-13)

    def test_social_penalty(self, instance):
        _, graph, sim, user_f, _ = instance
        args = (user_f, graph.edge_src, graph.edge_dst, sim.values)
        assert _kernels.social_penalty_jit(*args) == pytest.approx(
            _kernels.social_penalty_numpy(*args), rel=1e-12
        )

    def test_social_gradient(self, instance):
        _, graph, sim, user_f, _ = instance
        args = (user_f, graph.edge_src, graph.edge_dst, sim.values, 0.7)
        np.testing.assert_allclose(
            _kernels.social_gradient_jit(*args),
            _kernels.social_gradient_numpy(*args),
            rtol=1e-11, atol=1e-14,
        )

    def test_edge_similarities(self, instance):
        ratings, graph, _, _, _ = instance
        vss_args = (ratings.user_ptr, ratings.items, ratings.values,
                    graph.edge_src, graph.edge_dst)
        np.testing.assert_allclose(
            _kernels.vss_edges_jit(*vss_args),
            _kernels.vss_edges_numpy(*vss_args),
            rtol=1e-12, atol=1e-15,
        )
        pcc_args = (ratings.user_ptr, ratings.items, ratings.values,
                    ratings.user_means(), graph.edge_src, graph.edge_dst)
        np.testing.assert_allclose(
            _kernels.pcc_edges_jit(*pcc_args),
            _kernels.pcc_edges_numpy(*pcc_args),
            rtol=1e-12, atol=1e-15,
        )


class TestBackendSelection:
    def test_env_flag_selects_numpy_fallback(self):
        env = dict(os.environ, SOCREC_DISABLE_NUMBA="1")
        out = subprocess.run(
            [sys.executable, "-c",
             "from socrec import _kernels; print(_kernels.active_backend())"],
            capture_output=True, text=True, env=env, check=True,
        )
        assert out.stdout.strip() == "numpy"

    def test_fallback_training_matches_active_backend(self):
        """End to end: a small training run gives the same trajectory on the
        numpy fallback as on the active backend."""
        script = (
            "import numpy as np\n"
            "from socrec import Hyperparams, train\n"
            "from socrec.synthetic import clustered_dataset\n"
            "from socrec.similarity import SimilarityKind, build_similarity_table\n"
            "ratings, graph, _ = clustered_dataset(num_users=40, num_clusters=4, seed=77)\n"
            "sim = build_similarity_table(ratings, graph, SimilarityKind.pcc())\n"
            "hp = Hyperparams(k=3, lam=0.2, alpha=0.3, learning_rate=0.005,\n"
            "                 max_epochs=40, tolerance=1e-15, init_scale=0.1, seed=5)\n"
            "model, report = train(ratings, hp, graph, sim)\n"
            "print(repr(report.objective_per_epoch[-1]))\n"
            "print(repr(float(model.user_factors.sum())))\n"
        )
        results = {}
        for backend, flag in (("active", "0"), ("numpy", "1")):
            env = dict(os.environ, SOCREC_DISABLE_NUMBA=flag)
            out = subprocess.run([sys.executable, "-c", script],
                                 capture_output=True, text=True, env=env, check=True)
            results[backend] = [float(x) for x in out.stdout.split()]
        assert results["active"][0] == pytest.approx(results["numpy"][0], rel=1e-9)
        assert results["active"][1] == pytest.approx(results["numpy"][1], rel=1e-9)
