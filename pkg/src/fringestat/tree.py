"""Immutable array-backed rooted trees.

Nodes are numbered in generation order: the root is 0 and every other node's
parent has a smaller index.  A bottom-up pass is therefore a plain reverse
scan over node indices, and no traversal ever needs recursion.

Children are stored in CSR form (``child_start``/``child_list``) and keep
insertion order, which for generation-ordered input is ascending index
order.  Binary search trees may carry explicit ``left``/``right`` slots.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numba as nb
import numpy as np


class TreeError(ValueError):
    """Invalid tree input."""


class ModelTag(str, Enum):
    BST = "bst"
    RRT = "rrt"
    GENERIC = "generic"


@nb.njit(cache=True, nogil=True)
def _csr_children(parent):
    n = parent.shape[0]
    child_start = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n):
        child_start[parent[i] + 1] += 1
    for v in range(n):
        child_start[v + 1] += child_start[v]
    fill = child_start[:-1].copy()
    child_list = np.empty(max(n - 1, 0), dtype=np.int64)
    for i in range(1, n):
        p = parent[i]
        child_list[fill[p]] = i
        fill[p] += 1
    return child_start, child_list


@nb.njit(cache=True, nogil=True)
def _postorder(child_start, child_list):
    n = child_start.shape[0] - 1
    order = np.empty(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    cursor = np.empty(n, dtype=np.int64)
    top = 0
    stack[0] = 0
    cursor[0] = child_start[0]
    k = 0
    while top >= 0:
        v = stack[top]
        c = cursor[top]
        if c < child_start[v + 1]:
            cursor[top] = c + 1
            w = child_list[c]
            top += 1
            stack[top] = w
            cursor[top] = child_start[w]
        else:
            order[k] = v
            k += 1
            top -= 1
    return order


@nb.njit(cache=True, nogil=True)
def _fringe_sizes(parent):
    n = parent.shape[0]
    size = np.ones(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        size[parent[i]] += size[i]
    return size


@nb.njit(cache=True, nogil=True)
def _descendant_mask(parent, v):
    n = parent.shape[0]
    mask = np.zeros(n, dtype=np.bool_)
    mask[v] = True
    for i in range(v + 1, n):
        mask[i] = mask[parent[i]]
    return mask


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class RootedTree:
    """A validated rooted tree.  Construct through :func:`build_tree`.

    Attributes
    ----------
    parent : int64 array, ``parent[0] == -1``
    model_tag : ModelTag
    left, right : int64 arrays or None
        Child slots for binary search trees (-1 where empty).  ``None`` for
        other models, or for BST input whose sides were not recorded.
    child_start, child_list : CSR children, derived
    """

    parent: np.ndarray
    model_tag: ModelTag = ModelTag.GENERIC
    left: np.ndarray | None = None
    right: np.ndarray | None = None
    child_start: np.ndarray = field(init=False, repr=False)
    child_list: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        parent = np.array(self.parent, dtype=np.int64)
        tag = ModelTag(self.model_tag)
        _validate_parent(parent)
        child_start, child_list = _csr_children(parent)
        set_ = object.__setattr__
        set_(self, "parent", _readonly(parent))
        set_(self, "model_tag", tag)
        set_(self, "child_start", _readonly(child_start))
        set_(self, "child_list", _readonly(child_list))
        if tag is ModelTag.BST:
            if np.diff(child_start).max(initial=0) > 2:
                v = int(np.argmax(np.diff(child_start)))
                raise TreeError(f"bst node {v} has more than 2 children")
            if (self.left is None) != (self.right is None):
                raise TreeError("bst left and right slots must be given together")
            if self.left is not None:
                left = np.array(self.left, dtype=np.int64)
                right = np.array(self.right, dtype=np.int64)
                _validate_slots(parent, child_start, child_list, left, right)
                set_(self, "left", _readonly(left))
                set_(self, "right", _readonly(right))
        elif self.left is not None or self.right is not None:
            raise TreeError(f"left/right slots are only meaningful for bst, got {tag.value}")

    @property
    def n(self) -> int:
        return int(self.parent.shape[0])

    @property
    def num_children(self) -> np.ndarray:
        return np.diff(self.child_start)

    def children(self, v: int) -> np.ndarray:
        return self.child_list[self.child_start[v] : self.child_start[v + 1]]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"RootedTree(n={self.n}, model={self.model_tag.value})"


def _validate_parent(parent: np.ndarray) -> None:
    if parent.ndim != 1:
        raise TreeError("parent must be a one-dimensional array")
    n = parent.shape[0]
    if n == 0:
        raise TreeError("a tree needs at least one node (n = 0)")
    if parent[0] != -1:
        raise TreeError(f"parent[0] must be the root sentinel -1, got {parent[0]}")
    if n > 1:
        rest = parent[1:]
        own = np.arange(1, n, dtype=np.int64)
        bad = (rest < 0) | (rest >= own)
        if bad.any():
            i = int(np.flatnonzero(bad)[0]) + 1
            raise TreeError(
                f"parent[{i}] = {parent[i]} violates generation order "
                f"(need 0 <= parent[{i}] < {i})"
            )


def _validate_slots(parent, child_start, child_list, left, right) -> None:
    n = parent.shape[0]
    if left.shape != (n,) or right.shape != (n,):
        raise TreeError("left/right slot arrays must have length n")
    for name, slot in (("left", left), ("right", right)):
        used = slot >= 0
        if ((slot < -1) | (slot >= n)).any():
            raise TreeError(f"{name} slot index out of range")
        idx = np.flatnonzero(used)
        if (parent[slot[idx]] != idx).any():
            v = int(idx[np.flatnonzero(parent[slot[idx]] != idx)[0]])
            raise TreeError(f"{name}[{v}] = {slot[v]} is not a child of {v}")
    both = (left >= 0) & (left == right)
    if both.any():
        raise TreeError(f"node {int(np.flatnonzero(both)[0])} uses one child for both slots")
    counts = (left >= 0).astype(np.int64) + (right >= 0)
    if (counts != np.diff(child_start)).any():
        v = int(np.flatnonzero(counts != np.diff(child_start))[0])
        raise TreeError(f"slots of node {v} disagree with its children")


def build_tree(
    n: int,
    parent: Sequence[int | None] | np.ndarray,
    model_tag: ModelTag | str = ModelTag.GENERIC,
    left=None,
    right=None,
) -> RootedTree:
    """Validate a parent array and build the tree.

    ``parent[0]`` may be ``None`` or -1.  Raises :class:`TreeError` on
    ``n = 0``, a length mismatch, a parent index not smaller than the node's
    own index, or a BST node with more than two children.
    """
    if n < 1:
        raise TreeError("a tree needs at least one node (n = 0)")
    if isinstance(parent, np.ndarray):
        arr = parent.astype(np.int64, copy=True)
    else:
        arr = np.array([-1 if p is None else p for p in parent], dtype=np.int64)
    if arr.shape != (n,):
        raise TreeError(f"parent array has length {arr.shape[0]}, expected n = {n}")
    return RootedTree(arr, ModelTag(model_tag), left, right)


def postorder(tree: RootedTree) -> np.ndarray:
    """Children-before-parent order; siblings in stored order."""
    return _postorder(tree.child_start, tree.child_list)


def fringe_sizes(tree: RootedTree) -> np.ndarray:
    """``|T(v)|`` for every node, from one reverse scan."""
    return _readonly(_fringe_sizes(tree.parent))


def fringe_subtree(tree: RootedTree, v: int) -> RootedTree:
    """The fringe subtree T(v) as a standalone tree rooted at index 0."""
    mask = _descendant_mask(tree.parent, v)
    nodes = np.flatnonzero(mask)
    relabel = np.full(tree.n, -1, dtype=np.int64)
    relabel[nodes] = np.arange(nodes.shape[0])
    parent = relabel[tree.parent[nodes]]
    parent[0] = -1
    left = right = None
    if tree.model_tag is ModelTag.BST and tree.left is not None:
        left = np.where(tree.left[nodes] >= 0, relabel[tree.left[nodes]], -1)
        right = np.where(tree.right[nodes] >= 0, relabel[tree.right[nodes]], -1)
    return RootedTree(parent, tree.model_tag, left, right)


# -- shapes used throughout the tests and the verify command -----------------

def path_tree(n: int) -> RootedTree:
    """Path rooted at an endpoint."""
    return build_tree(n, [-1] + list(range(n - 1)))


def star_tree(leaves: int) -> RootedTree:
    """Star K_{1,leaves} rooted at its center."""
    return build_tree(leaves + 1, [-1] + [0] * leaves)


def caterpillar_tree(spine: int, legs: Sequence[int]) -> RootedTree:
    """Path of ``spine`` nodes rooted at an endpoint, ``legs[i]`` leaves on spine node i."""
    parent = [-1] + list(range(spine - 1))
    for i, k in enumerate(legs):
        parent.extend([i] * k)
    return build_tree(len(parent), parent)


# -- serialization -----------------------------------------------------------

def tree_to_dict(tree: RootedTree) -> dict[str, Any]:
    out: dict[str, Any] = {
        "model": tree.model_tag.value,
        "n": tree.n,
        "parent": tree.parent.tolist(),
    }
    if tree.left is not None:
        out["left"] = tree.left.tolist()
        out["right"] = tree.right.tolist()
    return out


def tree_to_json(tree: RootedTree) -> str:
    return json.dumps(tree_to_dict(tree), separators=(",", ":")) + "\n"


def tree_from_dict(obj: Any) -> RootedTree:
    if not isinstance(obj, dict):
        raise TreeError("tree JSON must be an object")
    for key in ("model", "n", "parent"):
        if key not in obj:
            raise TreeError(f"missing field '{key}'")
    try:
        tag = ModelTag(obj["model"])
    except ValueError:
        raise TreeError(f"field 'model': unknown model {obj['model']!r}") from None
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise TreeError(f"field 'n': expected integer, got {n!r}")
    parent = obj["parent"]
    if not isinstance(parent, list):
        raise TreeError("field 'parent': expected an array")
    for i, p in enumerate(parent):
        if not (isinstance(p, int) and not isinstance(p, bool)) and not (i == 0 and p is None):
            raise TreeError(f"field 'parent[{i}]': expected integer, got {p!r}")
    try:
        return build_tree(n, parent, tag, obj.get("left"), obj.get("right"))
    except TreeError as exc:
        raise TreeError(f"field 'parent': {exc}") from None


def tree_from_json(text: str) -> RootedTree:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TreeError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return tree_from_dict(obj)


def tree_to_dot(tree: RootedTree) -> str:
    lines = ["digraph T {"]
    lines.extend(f"  {v};" for v in range(tree.n))
    lines.extend(f"  {int(tree.parent[c])} -> {c};" for c in range(1, tree.n))
    lines.append("}")
    return "\n".join(lines) + "\n"
