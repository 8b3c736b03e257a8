"""Independent reference computations used only by the tests."""

from __future__ import annotations

import itertools

import numpy as np

from fringestat.tree import RootedTree


def greedy_matching(tree: RootedTree) -> int:
    """Maximum matching: match each unmatched node to its unmatched parent,
    deepest nodes first (optimal on trees)."""
    matched = np.zeros(tree.n, dtype=bool)
    size = 0
    for v in range(tree.n - 1, 0, -1):
        p = tree.parent[v]
        if not matched[v] and not matched[p]:
            matched[v] = matched[p] = True
            size += 1
    return size


def min_vertex_cover(tree: RootedTree) -> int:
    take = np.ones(tree.n, dtype=np.int64)
    skip = np.zeros(tree.n, dtype=np.int64)
    for v in range(tree.n - 1, 0, -1):
        p = tree.parent[v]
        take[p] += min(take[v], skip[v])
        skip[p] += take[v]
    return int(min(take[0], skip[0]))


def brute_edge_cover(tree: RootedTree) -> int:
    edges = [(int(tree.parent[v]), v) for v in range(1, tree.n)]
    for size in range(1, len(edges) + 1):
        for chosen in itertools.combinations(edges, size):
            if len({x for e in chosen for x in e}) == tree.n:
                return size
    raise AssertionError("tree without an edge cover")


def laplacian_eigenvalue_one(tree: RootedTree, tol: float = 1e-7) -> int:
    """Multiplicity of eigenvalue 1 of I - D^{-1/2} A D^{-1/2}."""
    n = tree.n
    A = np.zeros((n, n))
    for v in range(1, n):
        A[v, tree.parent[v]] = A[tree.parent[v], v] = 1.0
    if n < 2:
        raise ValueError("needs at least one edge")
    deg = A.sum(axis=1)
    d = 1.0 / np.sqrt(deg)
    L = np.eye(n) - d[:, None] * A * d[None, :]
    return int(np.sum(np.abs(np.linalg.eigvalsh(L) - 1.0) < tol))


def brute_dominating_sets(tree: RootedTree):
    """All minimum dominating sets, as frozensets."""
    n = tree.n
    closed = [{v} for v in range(n)]
    for v in range(1, n):
        closed[v].add(int(tree.parent[v]))
        closed[int(tree.parent[v])].add(v)
    for size in range(1, n + 1):
        found = [
            frozenset(S)
            for S in itertools.combinations(range(n), size)
            if all(closed[v] & set(S) for v in range(n))
        ]
        if found:
            return found
    return []


def forest_domination(tree: RootedTree, removed: int) -> int:
    """Brute-force domination number of T(removed) minus its root, where
    the tree is T(removed) itself rooted at 0 (so ``removed`` is 0)."""
    n = tree.n
    nodes = [v for v in range(n) if v != removed]
    if not nodes:
        return 0
    adj = {v: set() for v in nodes}
    for v in range(1, n):
        p = int(tree.parent[v])
        if v != removed and p != removed:
            adj[v].add(p)
            adj[p].add(v)
    for size in range(1, len(nodes) + 1):
        for S in itertools.combinations(nodes, size):
            s = set(S)
            if all(v in s or adj[v] & s for v in nodes):
                return size
    return len(nodes)
