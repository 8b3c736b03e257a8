"""Additive fringe functionals F(T; f) = sum over v of f(T(v)).

Each toll is evaluated for all nodes at once from the bottom-up flags of
:mod:`fringestat.params`; :func:`toll_locality_check` confirms that the
in-place value at v equals the toll of T(v) cut out as its own tree.

The domination toll treats the global root differently from every other
node, so a toll here is a function of (fringe subtree, is-root flag).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .params import domination, independence
from .tree import RootedTree, fringe_subtree


class Toll(str, Enum):
    INDEPENDENCE = "independence"
    DOMINATION = "domination"
    SIZE = "size"
    LEAF = "leaf"


@dataclass(frozen=True, eq=False)
class FringeSum:
    value: int
    per_node: np.ndarray


def _independence_tolls(tree: RootedTree, root_is_global: bool) -> np.ndarray:
    return independence(tree).in_set


def property_a(tree: RootedTree, rd: np.ndarray, ri: np.ndarray) -> bool:
    """Whether the global root joins the dominating set: some child subtree
    is root-dependent, or every child subtree is root-independent with no
    optimal set containing its root.  Vacuously true for a lone root."""
    kids = tree.children(0)
    if rd[kids].any():
        return True
    return bool((~rd[kids] & ~ri[kids]).all())


def _domination_tolls(tree: RootedTree, root_is_global: bool) -> np.ndarray:
    res = domination(tree)
    flags = res.ri_contains_root.copy()
    if root_is_global:
        flags[0] = property_a(tree, res.rd, res.ri_contains_root)
    return flags


def _size_tolls(tree: RootedTree, root_is_global: bool) -> np.ndarray:
    return np.ones(tree.n, dtype=bool)


def _leaf_tolls(tree: RootedTree, root_is_global: bool) -> np.ndarray:
    return tree.num_children == 0


_EVALUATORS: dict[Toll, Callable[[RootedTree, bool], np.ndarray]] = {
    Toll.INDEPENDENCE: _independence_tolls,
    Toll.DOMINATION: _domination_tolls,
    Toll.SIZE: _size_tolls,
    Toll.LEAF: _leaf_tolls,
}


def toll_flags(tree: RootedTree, toll: Toll | str, root_is_global: bool = True) -> np.ndarray:
    """Per-node 0/1 toll values; node 0 is scored as the global root unless
    ``root_is_global`` is false."""
    return _EVALUATORS[Toll(toll)](tree, root_is_global)


def evaluate_toll(tree: RootedTree, toll: Toll | str, is_root: bool) -> bool:
    """f of a single tree, scored at its root."""
    return bool(toll_flags(tree, toll, is_root)[0])


def fringe_sum(tree: RootedTree, toll: Toll | str) -> FringeSum:
    flags = toll_flags(tree, toll)
    return FringeSum(int(flags.sum()), flags)


def toll_locality_check(tree: RootedTree, toll: Toll | str) -> bool:
    """Cut out every non-root fringe subtree and compare its standalone toll
    with the in-place value.  Quadratic in the worst case; meant for tests."""
    flags = toll_flags(tree, toll)
    for v in range(1, tree.n):
        if evaluate_toll(fringe_subtree(tree, v), toll, is_root=False) != bool(flags[v]):
            return False
    return True
