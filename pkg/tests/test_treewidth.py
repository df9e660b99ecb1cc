import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bakertw.baker import opt_oracle
from bakertw.errors import UsageError
from bakertw.families import complete, cycle, empty, gnp, grid, path, tree
from bakertw.treewidth import (
    TreeDecomposition, canonical_problem, dp_solve, feasible, minor_min_width, nice_form,
    treewidth_exact, treewidth_upper, verify_decomposition,
)


def _brute(g, problem):
    best = None
    for r in range(g.n + 1):
        for s in itertools.combinations(range(g.n), r):
            if feasible(g, problem, s):
                if problem == "max_independent_set":
                    best = r
                elif best is None:
                    return r
    return best


def test_verify_decomposition_examples():
    g = path(5)
    assert verify_decomposition(g, TreeDecomposition((frozenset(range(5)),))).ok
    bags = tuple(frozenset({i, i + 1}) for i in range(4))
    td = TreeDecomposition(bags, tuple((i, i + 1) for i in range(3)))
    assert verify_decomposition(g, td).ok and td.width == 1
    broken = TreeDecomposition(bags[:3] + (frozenset({4}),), td.tree_edges)
    v = verify_decomposition(g, broken)
    assert "edge-uncovered" in v.kinds()
    with pytest.raises(UsageError):
        verify_decomposition(g, TreeDecomposition(bags, ((0, 1), (1, 0), (2, 3))))


def test_exact_widths():
    assert treewidth_exact(tree(30, 2)).width == 1
    assert treewidth_exact(cycle(7)).width == 2
    assert treewidth_exact(complete(6)).width == 5
    assert treewidth_exact(empty(4)).width == 0
    for k in range(2, 6):
        res = treewidth_exact(grid(k))
        assert res.width == k and res.exact
        assert verify_decomposition(grid(k), res.decomposition).ok


def test_exact_cap():
    res = treewidth_exact(grid(5), cap=3)
    assert res.width is None and res.lower == 4


def test_upper_bounds():
    assert treewidth_upper(tree(40, 5)).width == 1
    assert treewidth_upper(empty(3)).width == 0
    up = treewidth_upper(grid(5)).width
    assert 5 <= up <= 7
    assert minor_min_width(grid(5)) <= 5


def test_dp_examples():
    def solve(g, p):
        return dp_solve(g, treewidth_upper(g).decomposition, p)[0]
    assert solve(path(4), "mis") == 2
    assert (solve(cycle(5), "mis"), solve(cycle(5), "mvc"), solve(cycle(5), "mds")) == (2, 3, 2)
    assert solve(grid(3), "mis") == 5
    assert canonical_problem("mds") == "min_dominating_set"
    with pytest.raises(UsageError):
        canonical_problem("colouring")


def test_nice_form_covers_every_vertex():
    g = grid(3)
    td = treewidth_upper(g).decomposition
    kinds = {node[0] for node in nice_form(td)}
    assert {"introduce", "forget"} <= kinds


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 11), st.floats(0.1, 0.7), st.integers(0, 100_000))
def test_dp_matches_brute_force(n, p, seed):
    g = gnp(n, p, seed)
    td = treewidth_upper(g).decomposition
    assert verify_decomposition(g, td).ok
    vals = {}
    for problem in ("max_independent_set", "min_vertex_cover", "min_dominating_set"):
        val, wit = dp_solve(g, td, problem)
        assert feasible(g, problem, wit) and len(wit) == val
        assert val == _brute(g, problem) == opt_oracle(g, problem)
        vals[problem] = val
    assert vals["max_independent_set"] + vals["min_vertex_cover"] == n


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10), st.floats(0.1, 0.8), st.integers(0, 100_000))
def test_exact_width_below_heuristic(n, p, seed):
    g = gnp(n, p, seed)
    exact = treewidth_exact(g)
    assert minor_min_width(g) <= exact.width <= treewidth_upper(g).width
    assert verify_decomposition(g, exact.decomposition).ok
