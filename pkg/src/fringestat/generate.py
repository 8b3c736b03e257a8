"""Seedable generators for random recursive trees and random binary search trees.

Node ``i`` of a recursive tree carries label ``i + 1``; its parent is uniform
on ``{0, ..., i-1}``.  A binary search tree is built by shuffling
``1..n`` (Fisher-Yates) and inserting the keys one by one, so node ``i`` holds
the ``i``-th inserted key and generation order is automatic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from . import rng
from .tree import ModelTag, RootedTree, fringe_sizes


@dataclass(frozen=True)
class Seed:
    """Master seed plus replica index; ``stream`` is the derived stream seed."""

    master: int
    replica: int = 0

    def __post_init__(self):
        rng.check_seed(self.master)
        if self.replica < 0:
            raise ValueError("replica index must be non-negative")

    @property
    def stream(self) -> int:
        return rng.derive_seed(self.master, self.replica)


@dataclass(frozen=True)
class TreeSample:
    tree: RootedTree
    model: ModelTag
    n: int
    master_seed: int
    replica_index: int


@nb.njit(cache=True, nogil=True)
def rrt_parents(state, n):
    parent = np.empty(n, dtype=np.int64)
    parent[0] = -1
    for i in range(1, n):
        parent[i] = rng.below(state, i)
    return parent


@nb.njit(cache=True, nogil=True)
def bst_arrays(state, n):
    keys = np.arange(1, n + 1, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        j = rng.below(state, i + 1)
        t = keys[i]
        keys[i] = keys[j]
        keys[j] = t
    # key, left, right interleaved so each descent step touches one row
    node = np.full((n, 3), -1, dtype=np.int64)
    node[:, 0] = keys
    parent = np.empty(n, dtype=np.int64)
    parent[0] = -1
    for i in range(1, n):
        key = keys[i]
        v = 0
        while True:
            side = 1 if key < node[v, 0] else 2
            w = node[v, side]
            if w < 0:
                node[v, side] = i
                break
            v = w
        parent[i] = v
    left = node[:, 1].copy()
    right = node[:, 2].copy()
    return parent, left, right, keys


def _coerce_seed(seed: Seed | int, replica: int) -> Seed:
    return seed if isinstance(seed, Seed) else Seed(int(seed), replica)


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"tree size must be at least 1, got {n}")


def gen_recursive_tree(n: int, seed: Seed | int, replica: int = 0) -> TreeSample:
    _check_n(n)
    s = _coerce_seed(seed, replica)
    parent = rrt_parents(rng.new_state(s.stream), n)
    return TreeSample(RootedTree(parent, ModelTag.RRT), ModelTag.RRT, n, s.master, s.replica)


def gen_bst(n: int, seed: Seed | int, replica: int = 0) -> TreeSample:
    _check_n(n)
    s = _coerce_seed(seed, replica)
    parent, left, right, _ = bst_arrays(rng.new_state(s.stream), n)
    tree = RootedTree(parent, ModelTag.BST, left, right)
    return TreeSample(tree, ModelTag.BST, n, s.master, s.replica)


def bst_permutation(n: int, seed: Seed | int, replica: int = 0) -> np.ndarray:
    """The key permutation behind ``gen_bst(n, seed, replica)``."""
    _check_n(n)
    s = _coerce_seed(seed, replica)
    return bst_arrays(rng.new_state(s.stream), n)[3]


def generate(model: ModelTag | str, n: int, seed: Seed | int, replica: int = 0) -> TreeSample:
    model = ModelTag(model)
    if model is ModelTag.BST:
        return gen_bst(n, seed, replica)
    if model is ModelTag.RRT:
        return gen_recursive_tree(n, seed, replica)
    raise ValueError(f"no random generator for model {model.value!r}")


def left_subtree_size(sample: TreeSample) -> int:
    if sample.model is not ModelTag.BST:
        raise ValueError("left subtree size is defined for binary search trees only")
    root_left = int(sample.tree.left[0])
    return 0 if root_left < 0 else int(fringe_sizes(sample.tree)[root_left])


def cut_size_at_vertex2(sample: TreeSample) -> int:
    """Size of the part containing label 2 after cutting the edge 1-2."""
    if sample.model is not ModelTag.RRT:
        raise ValueError("the 1-2 cut is defined for random recursive trees only")
    if sample.n < 2:
        raise ValueError("the 1-2 cut needs at least two nodes")
    # label 2 is node 1, whose parent is always the root
    return int(fringe_sizes(sample.tree)[1])


@nb.njit(cache=True, nogil=True)
def _batch(model_code, n, streams):
    parents = np.empty((streams.shape[0], n), dtype=np.int64)
    lefts = np.full((streams.shape[0], n), -1, dtype=np.int64)
    state = np.empty(1, dtype=np.uint64)
    for r in range(streams.shape[0]):
        state[0] = streams[r]
        if model_code == 0:
            parent, left, _, _ = bst_arrays(state, n)
            parents[r] = parent
            lefts[r] = left
        else:
            parents[r] = rrt_parents(state, n)
    return parents, lefts


def batch_arrays(model: ModelTag | str, n: int, master: int, count: int):
    """Parent arrays (and, for bst, left slots) of replicas ``0..count-1``
    without building tree objects.  Row ``r`` equals the arrays of
    ``generate(model, n, master, r)``."""
    model = ModelTag(model)
    _check_n(n)
    if model is ModelTag.GENERIC:
        raise ValueError("no random generator for model 'generic'")
    streams = np.array([rng.derive_seed(master, r) for r in range(count)], dtype=np.uint64)
    parents, lefts = _batch(0 if model is ModelTag.BST else 1, n, streams)
    return (parents, lefts) if model is ModelTag.BST else (parents, None)
