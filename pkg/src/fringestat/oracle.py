"""Brute-force reference values for small trees.

Nothing clever happens here: subset problems enumerate all 2^n vertex
subsets (vectorised over bitmasks), and the clique cover number is found by
trying 1, 2, ... colours on the complement graph with plain backtracking.
"""

from __future__ import annotations

import numpy as np

from .tree import RootedTree

MAX_N_SUBSETS = 20
MAX_N_COLORING = 10


class BudgetExceeded(ValueError):
    """Input too large for exhaustive search."""


def _check(tree: RootedTree, cap: int) -> None:
    if tree.n > cap:
        raise BudgetExceeded(f"oracle budget is n <= {cap}, got n = {tree.n}")


def _edges(tree: RootedTree) -> list[tuple[int, int]]:
    return [(int(tree.parent[v]), v) for v in range(1, tree.n)]


def _all_masks(n: int) -> tuple[np.ndarray, np.ndarray]:
    masks = np.arange(1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(np.int8)
    return masks, bits


def brute_max_independent(tree: RootedTree) -> int:
    _check(tree, MAX_N_SUBSETS)
    _, bits = _all_masks(tree.n)
    ok = np.ones(bits.shape[0], dtype=bool)
    for u, v in _edges(tree):
        ok &= (bits[:, u] & bits[:, v]) == 0
    return int(bits[ok].sum(axis=1).max())


def brute_min_dominating(tree: RootedTree, k: int = 1) -> int:
    """Smallest S with every vertex outside S having at least k neighbours in S."""
    _check(tree, MAX_N_SUBSETS)
    if k < 1:
        raise ValueError("k must be at least 1")
    n = tree.n
    _, bits = _all_masks(n)
    hits = np.zeros(bits.shape, dtype=np.int16)
    for u, v in _edges(tree):
        hits[:, u] += bits[:, v]
        hits[:, v] += bits[:, u]
    ok = ((bits == 1) | (hits >= k)).all(axis=1)
    # S = V is always valid, so ok is never empty
    return int(bits[ok].sum(axis=1).min())


def _colorable(adj: list[set[int]], n: int, colors: int) -> bool:
    assign = [-1] * n

    def place(v: int, used: int) -> bool:
        if v == n:
            return True
        for c in range(min(used + 1, colors)):
            if all(assign[u] != c for u in adj[v] if u < v):
                assign[v] = c
                if place(v + 1, max(used, c + 1)):
                    return True
        assign[v] = -1
        return False

    return place(0, 0)


def brute_clique_cover(tree: RootedTree) -> int:
    """Chromatic number of the complement graph."""
    _check(tree, MAX_N_COLORING)
    n = tree.n
    tree_adj = [set() for _ in range(n)]
    for u, v in _edges(tree):
        tree_adj[u].add(v)
        tree_adj[v].add(u)
    comp = [{u for u in range(n) if u != v and u not in tree_adj[v]} for v in range(n)]
    for colors in range(1, n + 1):
        if _colorable(comp, n, colors):
            return colors
    return n
