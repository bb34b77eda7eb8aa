import numpy as np
import pytest

from socrec import (
    DataFileError,
    SparseRatings,
    TrustGraph,
    cold_start_split,
    load_dataset,
    load_ratings,
    load_trust,
    save_ratings,
    split_ratings,
)

from helpers import random_ratings


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadRatings:
    def test_basic_counts(self, tmp_path):
        path = write(tmp_path, "r.tsv", "a x 4\nb x 2\na y 5\n")
        ratings, ids = load_ratings(path)
        assert ratings.num_users == 2
        assert ratings.num_items == 2
        assert ratings.num_entries == 3
        assert ids.user_index("a") == 0 and ids.user_index("b") == 1

    def test_duplicate_keeps_last(self, tmp_path):
        path = write(tmp_path, "r.tsv", "a x 4\na x 2\n")
        ratings, _ = load_ratings(path)
        assert ratings.num_entries == 1
        assert ratings.values[0] == 2.0

    def test_comments_and_tabs(self, tmp_path):
        path = write(tmp_path, "r.tsv", "# header\na\tx\t4\n\nb x 3\n")
        ratings, _ = load_ratings(path)
        assert ratings.num_entries == 2

    def test_wrong_field_count(self, tmp_path):
        path = write(tmp_path, "r.tsv", "a x 4\na x\n")
        with pytest.raises(DataFileError, match=":2"):
            load_ratings(path)

    def test_non_numeric_rating(self, tmp_path):
        path = write(tmp_path, "r.tsv", "a x four\n")
        with pytest.raises(DataFileError, match=":1"):
            load_ratings(path)

    def test_rating_out_of_domain(self, tmp_path):
        path = write(tmp_path, "r.tsv", "a x 6\n")
        with pytest.raises(DataFileError, match="outside"):
            load_ratings(path)

    def test_save_load_round_trip(self, tmp_path):
        """Entries survive save/load exactly, keyed by external ids."""
        rng = np.random.default_rng(3)
        ratings = random_ratings(rng, 12, 9)
        path = tmp_path / "saved.tsv"
        save_ratings(ratings, path)
        loaded, ids = load_ratings(path)
        reloaded = {
            (ids.user_id(u), ids.item_id(i), r) for u, i, r in loaded.triples()
        }
        original = {(str(u), str(i), r) for u, i, r in ratings.triples()}
        assert reloaded == original


class TestSparseRatings:
    def test_duplicate_entry_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            SparseRatings(2, 2, [0, 0], [1, 1], [3.0, 4.0])

    def test_index_bounds_checked(self):
        with pytest.raises(ValueError, match="out of range"):
            SparseRatings(2, 2, [0, 2], [0, 1], [3.0, 4.0])

    def test_row_and_column_indexes_agree(self):
        rng = np.random.default_rng(8)
        ratings = random_ratings(rng, 10, 7)
        from_rows = {
            (u, int(i), float(r))
            for u in range(10)
            for i, r in zip(*ratings.items_of(u))
        }
        from_cols = {
            (int(u), i, float(r))
            for i in range(7)
            for u, r in zip(*ratings.users_of(i))
        }
        assert from_rows == from_cols == set(ratings.triples())

    def test_user_means(self):
        ratings = SparseRatings(2, 2, [0, 0, 1], [0, 1, 0], [2.0, 4.0, 5.0])
        np.testing.assert_allclose(ratings.user_means(), [3.0, 5.0])


class TestIdMap:
    def test_bijective_both_directions(self, tmp_path):
        path = write(tmp_path, "r.tsv", "a x 4\nb y 2\nc x 1\n")
        _, ids = load_ratings(path)
        for idx in range(ids.num_users):
            assert ids.user_index(ids.user_id(idx)) == idx
        for idx in range(ids.num_items):
            assert ids.item_index(ids.item_id(idx)) == idx


class TestLoadTrust:
    def test_mutual_edges(self, tmp_path):
        rpath = write(tmp_path, "r.tsv", "a x 4\nb y 3\n")
        tpath = write(tmp_path, "t.tsv", "a b\nb a\n")
        ratings, ids = load_ratings(rpath)
        graph = load_trust(tpath, ids)
        assert list(graph.out_neighbors(0)) == [1]
        assert list(graph.out_neighbors(1)) == [0]
        assert list(graph.in_neighbors(0)) == [1]
        assert list(graph.in_neighbors(1)) == [0]

    def test_self_loop_dropped(self, tmp_path):
        rpath = write(tmp_path, "r.tsv", "a x 4\n")
        tpath = write(tmp_path, "t.tsv", "a a\n")
        _, ids = load_ratings(rpath)
        graph = load_trust(tpath, ids)
        assert graph.num_edges == 0

    def test_duplicate_edge_collapsed(self, tmp_path):
        rpath = write(tmp_path, "r.tsv", "a x 4\nb y 3\n")
        tpath = write(tmp_path, "t.tsv", "a b\na b\n")
        _, ids = load_ratings(rpath)
        graph = load_trust(tpath, ids)
        assert graph.num_edges == 1

    def test_trust_only_users_extend_index_space(self, tmp_path):
        """Users appearing only in the trust file get empty rating rows."""
        rpath = write(tmp_path, "r.tsv", "a x 4\n")
        tpath = write(tmp_path, "t.tsv", "a c\n")
        ratings, graph, ids = load_dataset(rpath, tpath)
        assert ids.num_users == 2
        assert ratings.num_users == 2
        assert ratings.items_of(1)[0].size == 0
        assert graph.num_edges == 1

    def test_malformed_line(self, tmp_path):
        rpath = write(tmp_path, "r.tsv", "a x 4\n")
        tpath = write(tmp_path, "t.tsv", "a b c\n")
        _, ids = load_ratings(rpath)
        with pytest.raises(DataFileError, match=":1"):
            load_trust(tpath, ids)

    def test_degree_sums_match_edge_count(self):
        rng = np.random.default_rng(5)
        edges = {(int(a), int(b)) for a, b in rng.integers(0, 20, (60, 2)) if a != b}
        graph = TrustGraph.from_edges(20, edges)
        assert graph.out_degrees().sum() == graph.num_edges
        assert np.diff(graph.in_ptr).sum() == graph.num_edges


class TestSplitRatings:
    def test_ninety_percent_of_ten(self):
        rng = np.random.default_rng(0)
        ratings = random_ratings(rng, 5, 4, per_user=2)
        assert ratings.num_entries == 10
        split = split_ratings(ratings, 0.9, seed=1)
        assert split.train.num_entries == 9
        assert split.num_test == 1

    def test_same_seed_identical(self):
        rng = np.random.default_rng(1)
        ratings = random_ratings(rng, 20, 10)
        a = split_ratings(ratings, 0.8, seed=7)
        b = split_ratings(ratings, 0.8, seed=7)
        np.testing.assert_array_equal(a.train.users, b.train.users)
        np.testing.assert_array_equal(a.train.items, b.train.items)
        np.testing.assert_array_equal(a.test_users, b.test_users)
        np.testing.assert_array_equal(a.test_items, b.test_items)

    def test_different_seeds_differ(self):
        """Oracle: direct set comparison of the two runs' test sets."""
        rng = np.random.default_rng(2)
        ratings = random_ratings(rng, 100, 50, per_user=20)
        a = split_ratings(ratings, 0.9, seed=1)
        b = split_ratings(ratings, 0.9, seed=2)
        set_a = set(zip(a.test_users.tolist(), a.test_items.tolist()))
        set_b = set(zip(b.test_users.tolist(), b.test_items.tolist()))
        assert set_a != set_b

    def test_partition_is_exact(self):
        rng = np.random.default_rng(3)
        ratings = random_ratings(rng, 15, 8)
        split = split_ratings(ratings, 0.7, seed=4)
        train = set(split.train.triples())
        test = set(split.test_triples())
        assert train | test == set(ratings.triples())
        assert train & test == set()

    def test_fraction_out_of_range(self):
        rng = np.random.default_rng(4)
        ratings = random_ratings(rng, 4, 4)
        for bad in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(ValueError):
                split_ratings(ratings, bad, seed=1)


class TestColdStartSplit:
    def test_cold_user_holds_out_one(self):
        ratings = SparseRatings(2, 7, [0, 0, 0, 1, 1, 1, 1], np.arange(7), np.full(7, 3.0))
        split = cold_start_split(ratings, threshold=5, seed=1)
        # user 0 has 3 ratings -> 2 train + 1 test; user 1 has 4 -> 3 + 1
        assert split.train.items_of(0)[0].size == 2
        assert split.train.items_of(1)[0].size == 3
        assert split.num_test == 2

    def test_heavy_user_untouched(self):
        ratings = SparseRatings(1, 7, [0] * 7, np.arange(7), np.full(7, 3.0))
        split = cold_start_split(ratings, threshold=5, seed=1)
        assert split.train.num_entries == 7
        assert split.num_test == 0

    def test_single_rating_user_goes_to_test(self):
        ratings = SparseRatings(1, 1, [0], [0], [4.0])
        split = cold_start_split(ratings, threshold=5, seed=1)
        assert split.train.num_entries == 0
        assert split.num_test == 1

    def test_every_cold_user_has_exactly_one_test_entry(self):
        rng = np.random.default_rng(9)
        ratings = random_ratings(rng, 30, 12)
        threshold = 5
        split = cold_start_split(ratings, threshold, seed=2)
        counts = ratings.user_counts()
        test_per_user = np.bincount(split.test_users, minlength=30)
        for u in range(30):
            expected = 1 if 1 <= counts[u] < threshold else 0
            assert test_per_user[u] == expected

    def test_threshold_validation(self):
        ratings = SparseRatings(1, 1, [0], [0], [4.0])
        with pytest.raises(ValueError):
            cold_start_split(ratings, threshold=1)
