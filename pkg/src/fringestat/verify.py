"""Certify the linear-time algorithms against the brute-force oracles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import fringe, oracle, params, rng
from .generate import generate
from .tree import ModelTag, RootedTree, caterpillar_tree, path_tree, star_tree


@dataclass(frozen=True)
class Check:
    name: str
    fast: Callable[[RootedTree], object]
    reference: Callable[[RootedTree], object]
    max_n: int = oracle.MAX_N_SUBSETS


def _kdom(k: int) -> Check:
    return Check(
        f"D{k}",
        lambda t: params.k_domination(t, k),
        lambda t: oracle.brute_min_dominating(t, k),
    )


CHECKS: list[Check] = [
    Check("I", lambda t: params.independence(t).value, oracle.brute_max_independent),
    Check(
        "I layered flags",
        lambda t: params.independence(t).in_set.tolist(),
        lambda t: params.layered_stripping(t).in_set.tolist(),
    ),
    Check("D", lambda t: params.domination(t).value, oracle.brute_min_dominating),
    _kdom(1),
    _kdom(2),
    _kdom(3),
    Check("CC", lambda t: params.full_report(t).CC, oracle.brute_clique_cover, oracle.MAX_N_COLORING),
    Check("CC = I (oracles)", oracle.brute_clique_cover, oracle.brute_max_independent, oracle.MAX_N_COLORING),
    Check("F(independence toll)", lambda t: fringe.fringe_sum(t, "independence").value, oracle.brute_max_independent),
    Check("F(domination toll)", lambda t: fringe.fringe_sum(t, "domination").value, oracle.brute_min_dominating),
]


def adversarial_shapes(max_n: int) -> Iterator[RootedTree]:
    """Paths, stars, caterpillars and spiders up to ``max_n`` nodes."""
    for n in range(1, max_n + 1):
        yield path_tree(n)
    for leaves in range(1, max_n):
        yield star_tree(leaves)
    for spine in range(2, max_n):
        for leg in (1, 2):
            legs = [leg] * spine
            if spine + sum(legs) <= max_n:
                yield caterpillar_tree(spine, legs)
        legs = [1 if i % 2 == 0 else 0 for i in range(spine)]
        if spine + sum(legs) <= max_n:
            yield caterpillar_tree(spine, legs)
    # spiders: legs of length 2 from the root
    for arms in range(1, (max_n - 1) // 2 + 1):
        parent = [-1] + [0] * arms + list(range(1, arms + 1))
        yield RootedTree(np.array(parent), ModelTag.GENERIC)


def random_corpus(trees: int, max_n: int, seed: int) -> Iterator[RootedTree]:
    """``trees`` random trees per model with sizes uniform on 1..max_n."""
    for m, model in enumerate((ModelTag.BST, ModelTag.RRT)):
        sizes = rng.SplitMix64(rng.derive_seed(seed, 1000 + m))
        for t in range(trees):
            n = sizes.below(max_n) + 1
            yield generate(model, n, rng.derive_seed(seed, m), t).tree


@dataclass
class CheckTally:
    name: str
    checked: int = 0
    failures: list[tuple[RootedTree, object, object]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def run_checks(corpus, checks: list[Check] | None = None) -> list[CheckTally]:
    checks = CHECKS if checks is None else checks
    tallies = [CheckTally(c.name) for c in checks]
    for tree in corpus:
        for check, tally in zip(checks, tallies):
            if tree.n > check.max_n:
                continue
            got, want = check.fast(tree), check.reference(tree)
            tally.checked += 1
            if got != want:
                tally.failures.append((tree, got, want))
    return tallies


def verify(trees: int = 500, max_n: int = 14, seed: int = 7) -> list[CheckTally]:
    if max_n > oracle.MAX_N_SUBSETS:
        raise oracle.BudgetExceeded(f"--max-n is capped at {oracle.MAX_N_SUBSETS}")
    if max_n < 1:
        raise ValueError("max-n must be positive")

    def corpus():
        yield from random_corpus(trees, max_n, seed)
        yield from adversarial_shapes(max_n)

    return run_checks(corpus())
