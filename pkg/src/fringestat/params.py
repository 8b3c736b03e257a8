"""Exact linear-time graph parameters of rooted trees.

Every routine is a single bottom-up pass.  Because nodes are in generation
order, "bottom-up" means a reverse scan over indices; children are read from
the CSR arrays of :class:`~fringestat.tree.RootedTree`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numba as nb
import numpy as np

from .tree import ModelTag, RootedTree


class ModelConstraintError(ValueError):
    """A parameter request that the tree model does not admit."""


# -- kernels -------------------------------------------------------------------

@nb.njit(cache=True, nogil=True)
def independence_flags(parent):
    # flag(v) = no child of v is flagged; leaves are flagged
    n = parent.shape[0]
    flag = np.ones(n, dtype=np.bool_)
    for i in range(n - 1, 0, -1):
        if flag[i]:
            flag[parent[i]] = False
    return flag


@nb.njit(cache=True, nogil=True)
def domination_table(child_start, child_list):
    n = child_start.shape[0] - 1
    inf = n + 1
    d0 = np.empty(n, dtype=np.int64)
    d1 = np.empty(n, dtype=np.int64)
    d2 = np.empty(n, dtype=np.int64)
    for v in range(n - 1, -1, -1):
        s_any = 0
        s_dom = 0
        forced = False
        extra = inf
        for e in range(child_start[v], child_start[v + 1]):
            c = child_list[e]
            m = min(d0[c], d1[c])
            s_dom += m
            s_any += min(m, d2[c])
            if d0[c] <= d1[c]:
                forced = True
            elif d0[c] - m < extra:
                extra = d0[c] - m
        d0[v] = 1 + s_any
        d2[v] = s_dom
        if child_start[v] == child_start[v + 1]:
            d1[v] = inf
        elif forced:
            d1[v] = s_dom
        else:
            d1[v] = s_dom + extra
    return d0, d1, d2


@nb.njit(cache=True, nogil=True)
def domination_value(child_start, child_list):
    d0, d1, _ = domination_table(child_start, child_list)
    return min(d0[0], d1[0])


@nb.njit(cache=True, nogil=True)
def k_domination_value(parent, k):
    # in_s[v]: v in S.  out[v, j]: v not in S with j (saturating at k) children in S.
    # Both count only sets where every node of T(v) other than v is satisfied.
    n = parent.shape[0]
    inf = n + 1
    acc_in = np.zeros(n, dtype=np.int64)
    out = np.full((n, k + 1), inf, dtype=np.int64)
    out[:, 0] = 0
    in_s = np.empty(n, dtype=np.int64)
    row = np.empty(k + 1, dtype=np.int64)
    for v in range(n - 1, -1, -1):
        in_s[v] = 1 + acc_in[v]
        if v == 0:
            break
        p = parent[v]
        # parent in S: v may stay out once it has k-1 children in S
        acc_in[p] += min(in_s[v], min(out[v, k - 1], out[v, k]))
        # parent out: v out needs all k from its children
        stay_out = out[v, k]
        for j in range(k + 1):
            row[j] = inf
        for j in range(k + 1):
            base = out[p, j]
            if base >= inf:
                continue
            if stay_out < inf and base + stay_out < row[j]:
                row[j] = base + stay_out
            jj = min(j + 1, k)
            if base + in_s[v] < row[jj]:
                row[jj] = base + in_s[v]
        for j in range(k + 1):
            out[p, j] = min(row[j], inf)
    return min(in_s[0], out[0, k])


# -- results -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IndependenceResult:
    value: int
    in_set: np.ndarray


@dataclass(frozen=True, eq=False)
class DominationResult:
    """Domination number plus the per-node table.

    ``d0``/``d1``/``d2`` are minimum dominating-set sizes for T(v) with v in
    the set, v outside but dominated, and v outside and possibly undominated.
    Leaves have ``d1 = n + 1`` as an infinity marker.
    """

    value: int
    d0: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    rd: np.ndarray
    ri_contains_root: np.ndarray

    @property
    def subtree_value(self) -> np.ndarray:
        return np.minimum(self.d0, self.d1)


@dataclass(frozen=True)
class ParameterReport:
    n: int
    I: int
    D: int
    M: int
    VC: int
    EC: int | None
    CC: int
    lap1_mult: int
    Dk: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "I": self.I,
            "D": self.D,
            "Dk": {str(k): v for k, v in sorted(self.Dk.items())},
            "M": self.M,
            "VC": self.VC,
            "EC": self.EC,
            "CC": self.CC,
            "lap1_mult": self.lap1_mult,
        }


# -- operations ----------------------------------------------------------------

def independence(tree: RootedTree) -> IndependenceResult:
    """Maximum independent set built from the leaves upward."""
    flags = independence_flags(tree.parent)
    return IndependenceResult(int(flags.sum()), flags)


def layered_stripping(tree: RootedTree) -> IndependenceResult:
    """Literal leaf stripping: repeatedly remove all leaves of the current
    forest together with their parents, collecting the leaves of each round.

    Slower and more literal than :func:`independence`; both must agree flag
    for flag.
    """
    n = tree.n
    parent = tree.parent
    alive = np.ones(n, dtype=bool)
    live_children = tree.num_children.copy()
    flags = np.zeros(n, dtype=bool)
    frontier = set(np.flatnonzero(live_children == 0).tolist())
    while frontier:
        leaves = sorted(frontier)
        flags[leaves] = True
        removed = set(leaves)
        # a leaf may be a forest root whose parent left in an earlier round
        removed.update(int(parent[v]) for v in leaves if v > 0 and alive[parent[v]])
        frontier = set()
        for v in removed:
            alive[v] = False
        for v in removed:
            p = int(parent[v]) if v > 0 else -1
            if p >= 0 and alive[p]:
                live_children[p] -= 1
                if live_children[p] == 0:
                    frontier.add(p)
    return IndependenceResult(int(flags.sum()), flags)


def domination(tree: RootedTree) -> DominationResult:
    d0, d1, d2 = domination_table(tree.child_start, tree.child_list)
    sub = np.minimum(d0, d1)
    # T(v) minus v can be dominated with one vertex fewer than T(v)
    rd = d2 == sub - 1
    ri = ~rd & (d0 == sub)
    return DominationResult(int(sub[0]), d0, d1, d2, rd, ri)


def k_domination(tree: RootedTree, k: int) -> int:
    """Minimum S such that each vertex outside S has at least k neighbours in S."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if tree.model_tag is ModelTag.BST and k > 3:
        raise ModelConstraintError(
            f"binary search trees have maximum degree 3; k = {k} > 3 is not admitted"
        )
    return int(k_domination_value(tree.parent, k))


def full_report(tree: RootedTree, k_list: Iterable[int] = ()) -> ParameterReport:
    I = independence(tree).value
    D = int(domination_value(tree.child_start, tree.child_list))
    dk = {int(k): k_domination(tree, int(k)) for k in k_list}
    n = tree.n
    M = n - I
    return ParameterReport(
        n=n,
        I=I,
        D=D,
        M=M,
        VC=M,
        EC=I if n >= 2 else None,
        CC=I,
        lap1_mult=2 * I - n,
        Dk=dk,
    )
