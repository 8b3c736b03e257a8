from __future__ import annotations

import pytest

from fringestat import oracle
from fringestat.params import full_report
from fringestat.tree import RootedTree

import helpers

# Every RootedTree built while the suite runs is checked against the affine
# identities of the parameter report.  Where cheap, the affine quantities
# are also recomputed by independent means.
AFFINE_LOG = {"trees": 0, "independent": 0}
_INDEPENDENT_MAX_N = 200_000

_original_post_init = RootedTree.__post_init__


def check_affine_identities(tree: RootedTree) -> None:
    rep = full_report(tree)
    n = tree.n
    assert rep.I + rep.M == n
    assert rep.VC == rep.M
    assert rep.CC == rep.I
    assert rep.lap1_mult == 2 * rep.I - n
    if n >= 2:
        assert rep.EC == rep.I
    else:
        assert rep.EC is None
    if n <= _INDEPENDENT_MAX_N:
        assert helpers.greedy_matching(tree) == rep.M
        assert helpers.min_vertex_cover(tree) == rep.VC
        if 2 <= n <= 40:
            assert helpers.laplacian_eigenvalue_one(tree) == rep.lap1_mult
        if 2 <= n <= 9:
            assert helpers.brute_edge_cover(tree) == rep.EC
        if n <= 7:
            assert oracle.brute_clique_cover(tree) == rep.CC
        AFFINE_LOG["independent"] += 1
    AFFINE_LOG["trees"] += 1


def _checked_post_init(self):
    _original_post_init(self)
    check_affine_identities(self)


RootedTree.__post_init__ = _checked_post_init


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    def record(criterion: str, passed: bool, detail: str) -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    terminalreporter.write_line(
        f"affine identities checked on {AFFINE_LOG['trees']} constructed trees "
        f"({AFFINE_LOG['independent']} with independent recomputation)"
    )
