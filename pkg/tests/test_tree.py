import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fringestat.generate import gen_bst, gen_recursive_tree
from fringestat.tree import (
    ModelTag,
    RootedTree,
    TreeError,
    build_tree,
    caterpillar_tree,
    fringe_sizes,
    fringe_subtree,
    path_tree,
    postorder,
    star_tree,
    tree_from_json,
    tree_to_dot,
    tree_to_json,
)


@st.composite
def parent_arrays(draw, max_n=60):
    n = draw(st.integers(1, max_n))
    return [-1] + [draw(st.integers(0, i - 1)) for i in range(1, n)]


class TestBuildTree:
    def test_single_node(self):
        t = build_tree(1, [None])
        assert t.n == 1 and t.parent.tolist() == [-1]
        assert t.children(0).tolist() == []

    def test_star_with_two_leaves(self):
        t = build_tree(3, [None, 0, 0])
        assert t.children(0).tolist() == [1, 2]

    def test_generation_order_violation(self):
        with pytest.raises(TreeError, match="generation order"):
            build_tree(3, [None, 0, 2])

    @pytest.mark.parametrize(
        "n, parent",
        [(0, []), (2, [-1]), (2, [0, 0]), (3, [-1, 0, -1]), (2, [-1, 1])],
    )
    def test_rejects(self, n, parent):
        with pytest.raises(TreeError):
            build_tree(n, parent)

    def test_bst_tag_rejects_three_children(self):
        with pytest.raises(TreeError, match="more than 2"):
            build_tree(4, [-1, 0, 0, 0], "bst")
        build_tree(4, [-1, 0, 0, 0], "generic")

    def test_bst_slots_must_match_children(self):
        with pytest.raises(TreeError):
            build_tree(3, [-1, 0, 0], "bst", left=[1, -1, -1], right=[-1, -1, -1])
        with pytest.raises(TreeError):
            build_tree(3, [-1, 0, 0], "bst", left=[1, -1, -1], right=[1, -1, -1])
        t = build_tree(3, [-1, 0, 0], "bst", left=[2, -1, -1], right=[1, -1, -1])
        assert t.left[0] == 2

    def test_slots_only_for_bst(self):
        with pytest.raises(TreeError):
            build_tree(2, [-1, 0], "rrt", left=[1, -1], right=[-1, -1])

    def test_immutable(self):
        t = path_tree(3)
        with pytest.raises(ValueError):
            t.parent[1] = 0
        with pytest.raises(AttributeError):
            t.parent = np.array([-1])

    @given(parent_arrays())
    def test_parent_children_round_trip(self, parent):
        t = build_tree(len(parent), parent)
        rebuilt = np.full(t.n, -1)
        for p in range(t.n):
            for c in t.children(p):
                rebuilt[c] = p
        assert rebuilt.tolist() == parent
        assert t.num_children.sum() == t.n - 1


class TestPostorder:
    def test_single(self):
        assert postorder(build_tree(1, [-1])).tolist() == [0]

    def test_path(self):
        assert postorder(path_tree(3)).tolist() == [2, 1, 0]

    def test_star(self):
        assert postorder(star_tree(3)).tolist() == [1, 2, 3, 0]

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 10_000), st.integers(0, 2**64 - 1), st.sampled_from(["bst", "rrt"]))
    def test_is_topological_permutation(self, n, seed, model):
        t = (gen_bst if model == "bst" else gen_recursive_tree)(n, seed).tree
        order = postorder(t)
        assert sorted(order.tolist()) == list(range(n))
        pos = np.empty(n, dtype=np.int64)
        pos[order] = np.arange(n)
        assert (pos[1:] < pos[t.parent[1:]]).all()

    def test_deep_path_has_no_recursion_limit(self):
        t = path_tree(1_000_000)
        order = postorder(t)
        assert order[0] == 999_999 and order[-1] == 0
        assert fringe_sizes(t)[0] == 1_000_000


class TestFringeSizes:
    def test_examples(self):
        assert fringe_sizes(build_tree(1, [-1])).tolist() == [1]
        assert fringe_sizes(path_tree(3)).tolist() == [3, 2, 1]
        assert fringe_sizes(star_tree(3)).tolist() == [4, 1, 1, 1]

    @given(parent_arrays())
    def test_sum_rule(self, parent):
        t = build_tree(len(parent), parent)
        size = fringe_sizes(t)
        for v in range(t.n):
            assert size[v] == 1 + sum(size[c] for c in t.children(v))
        assert size[0] == t.n


def test_fringe_subtree_relabels_in_order():
    t = caterpillar_tree(3, [0, 2, 0])  # spine 0-1-2, leaves 3,4 on node 1
    sub = fringe_subtree(t, 1)
    assert sub.parent.tolist() == [-1, 0, 0, 0]
    assert fringe_subtree(t, 3).n == 1


def test_fringe_subtree_keeps_bst_slots():
    t = gen_bst(50, 3).tree
    for v in range(t.n):
        sub = fringe_subtree(t, v)
        assert sub.model_tag is ModelTag.BST
        assert sub.n == fringe_sizes(t)[v]


class TestSerialization:
    def test_json_round_trip(self):
        for t in (gen_bst(40, 1).tree, gen_recursive_tree(40, 1).tree, star_tree(4)):
            back = tree_from_json(tree_to_json(t))
            assert back.parent.tolist() == t.parent.tolist()
            assert back.model_tag is t.model_tag
            if t.left is not None:
                assert back.left.tolist() == t.left.tolist()

    def test_json_schema(self):
        obj = json.loads(tree_to_json(gen_recursive_tree(5, 1).tree))
        assert obj["model"] == "rrt" and obj["n"] == 5 and obj["parent"][0] == -1
        assert set(obj) == {"model", "n", "parent"}

    def test_bst_without_slots_loads(self):
        t = tree_from_json('{"model":"bst","n":3,"parent":[-1,0,0]}')
        assert t.left is None

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("{", "line 1"),
            ('{"model":"bst","n":2}', "'parent'"),
            ('{"model":"avl","n":1,"parent":[-1]}', "'model'"),
            ('{"model":"generic","n":2,"parent":[-1,"a"]}', "parent[1]"),
            ('{"model":"generic","n":4,"parent":[-1,0,1,5]}', "parent[3]"),
            ('{"model":"generic","n":"4","parent":[-1]}', "'n'"),
        ],
    )
    def test_diagnostics(self, text, fragment):
        with pytest.raises(TreeError, match=fragment.replace("[", r"\[").replace("]", r"\]")):
            tree_from_json(text)

    def test_dot(self):
        assert tree_to_dot(path_tree(2)) == "digraph T {\n  0;\n  1;\n  0 -> 1;\n}\n"


def test_rootedtree_direct_construction_validates():
    with pytest.raises(TreeError):
        RootedTree(np.array([-1, 1]))
