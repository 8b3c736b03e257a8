import itertools

import numpy as np
import pytest
from scipy import stats

from fringestat.generate import (
    Seed,
    batch_arrays,
    bst_permutation,
    cut_size_at_vertex2,
    gen_bst,
    gen_recursive_tree,
    generate,
    left_subtree_size,
)
from fringestat.tree import ModelTag

SAMPLES = 100_000


def _subtree_sizes(parents: np.ndarray) -> np.ndarray:
    """Fringe sizes for a stack of parent arrays, one row per tree."""
    rows = np.arange(parents.shape[0])
    size = np.ones(parents.shape, dtype=np.int64)
    for i in range(parents.shape[1] - 1, 0, -1):
        size[rows, parents[:, i]] += size[:, i]
    return size


def _insert(keys):
    """Plain-Python BST insertion returning parent indices in insertion order."""
    left, right, parent = {}, {}, [-1]
    for i, key in enumerate(keys[1:], start=1):
        v = 0
        while True:
            slot = left if key < keys[v] else right
            if v not in slot:
                slot[v] = i
                parent.append(v)
                break
            v = slot[v]
    return parent


class TestSmallCases:
    @pytest.mark.parametrize("model", ["bst", "rrt"])
    def test_single_node(self, model):
        s = generate(model, 1, 5)
        assert s.tree.parent.tolist() == [-1] and s.n == 1
        assert s.model is ModelTag(model)

    @pytest.mark.parametrize("model", ["bst", "rrt"])
    def test_two_nodes(self, model):
        for r in range(20):
            assert generate(model, 2, 0, r).tree.parent.tolist() == [-1, 0]

    def test_rrt_three_nodes_shapes(self):
        shapes = {tuple(gen_recursive_tree(3, 1, r).tree.parent) for r in range(200)}
        assert shapes == {(-1, 0, 0), (-1, 0, 1)}

    def test_bst_matches_plain_insertion(self):
        for r in range(200):
            s = gen_bst(9, 11, r)
            perm = bst_permutation(9, 11, r)
            assert sorted(perm.tolist()) == list(range(1, 10))
            assert s.tree.parent.tolist() == _insert(perm.tolist())

    def test_bst_slots_follow_key_order(self):
        s = gen_bst(30, 4)
        perm = bst_permutation(30, 4)
        for v in range(30):
            if s.tree.left[v] >= 0:
                assert perm[s.tree.left[v]] < perm[v]
            if s.tree.right[v] >= 0:
                assert perm[s.tree.right[v]] > perm[v]


class TestDistribution:
    def test_rrt_three_node_star_frequency(self):
        parents, _ = batch_arrays("rrt", 3, 2024, SAMPLES)
        assert abs(np.mean(parents[:, 2] == 0) - 0.5) <= 0.01

    def test_bst_three_node_balanced_frequency(self):
        # exact value by enumerating all insertion orders
        exact = np.mean([_insert(list(p)) == [-1, 0, 0] for p in itertools.permutations((1, 2, 3))])
        assert exact == pytest.approx(1 / 3)
        parents, _ = batch_arrays("bst", 3, 2024, SAMPLES)
        balanced = np.mean((parents[:, 1] == 0) & (parents[:, 2] == 0))
        assert abs(balanced - exact) <= 0.01

    def test_bst_left_subtree_size_uniform(self):
        parents, lefts = batch_arrays("bst", 10, 77, SAMPLES)
        size = _subtree_sizes(parents)
        root_left = lefts[:, 0]
        got = np.where(root_left < 0, 0, size[np.arange(SAMPLES), np.maximum(root_left, 0)])
        counts = np.bincount(got, minlength=10)
        assert counts.size == 10
        assert stats.chisquare(counts).pvalue > 1e-3

    def test_rrt_cut_size_uniform(self):
        parents, _ = batch_arrays("rrt", 10, 78, SAMPLES)
        got = _subtree_sizes(parents)[:, 1]
        counts = np.bincount(got, minlength=10)[1:]
        assert counts.size == 9
        assert stats.chisquare(counts).pvalue > 1e-3

    def test_rrt_parent_coordinates_uniform(self):
        parents, _ = batch_arrays("rrt", 20, 79, 40_000)
        for i in range(2, 20):
            counts = np.bincount(parents[:, i], minlength=i)
            assert counts.size == i
            assert stats.chisquare(counts).pvalue > 1e-4, i

    def test_batch_rows_match_single_trees(self):
        for model in ("bst", "rrt"):
            parents, lefts = batch_arrays(model, 25, 9, 30)
            for r in range(30):
                t = generate(model, 25, 9, r).tree
                assert parents[r].tolist() == t.parent.tolist()
                if model == "bst":
                    assert lefts[r].tolist() == t.left.tolist()


class TestDerivedSizes:
    def test_left_subtree_size_matches_root_key(self):
        for r in range(100):
            s = gen_bst(15, 3, r)
            assert left_subtree_size(s) == bst_permutation(15, 3, r)[0] - 1

    def test_cut_size_examples(self):
        s = gen_recursive_tree(2, 0)
        assert cut_size_at_vertex2(s) == 1
        for r in range(50):
            s = gen_recursive_tree(12, 8, r)
            assert 1 <= cut_size_at_vertex2(s) <= 11

    def test_wrong_model(self):
        with pytest.raises(ValueError):
            left_subtree_size(gen_recursive_tree(5, 1))
        with pytest.raises(ValueError):
            cut_size_at_vertex2(gen_bst(5, 1))
        with pytest.raises(ValueError):
            cut_size_at_vertex2(gen_recursive_tree(1, 1))


class TestSeeding:
    @pytest.mark.parametrize("model", ["bst", "rrt"])
    def test_deterministic(self, model):
        a = generate(model, 500, 123, 4).tree.parent
        b = generate(model, 500, 123, 4).tree.parent
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("model", ["bst", "rrt"])
    def test_replicas_differ(self, model):
        trees = {tuple(generate(model, 50, 123, r).tree.parent) for r in range(20)}
        assert len(trees) == 20

    def test_seed_object(self):
        s = gen_bst(20, Seed(7, 3))
        assert (s.master_seed, s.replica_index) == (7, 3)
        assert np.array_equal(s.tree.parent, gen_bst(20, 7, 3).tree.parent)

    def test_seed_extremes(self):
        gen_recursive_tree(10, 2**64 - 1)
        with pytest.raises(ValueError):
            Seed(2**64)
        with pytest.raises(ValueError):
            Seed(1, -1)


@pytest.mark.parametrize("n", [0, -3])
def test_bad_size(n):
    with pytest.raises(ValueError):
        gen_bst(n, 1)
    with pytest.raises(ValueError):
        gen_recursive_tree(n, 1)


def test_generic_model_has_no_generator():
    with pytest.raises(ValueError):
        generate("generic", 3, 1)
    with pytest.raises(ValueError):
        batch_arrays("generic", 3, 1, 2)
