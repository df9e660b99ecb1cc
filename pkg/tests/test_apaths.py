import pytest
from hypothesis import given, settings, strategies as st

from bakertw.apaths import (
    APathsFailure, PathSystem, anti_complete_apaths, disjoint_apaths_bounded_degree, f_a, gallai,
    induced_menger, max_disjoint_apaths, prop_threshold, verify_paths,
)
from bakertw.errors import UsageError
from bakertw.families import path, random_bounded_degree, rng, star, tree
from bakertw.graph import Graph


def test_verify_paths_flags():
    g = path(5)
    ps = PathSystem(g, ((0, 1, 2), (2, 3, 4)), frozenset({0, 2, 4}))
    assert "not-disjoint" in verify_paths(ps).kinds()
    ps = PathSystem(g, ((0, 2),), frozenset({0, 2}))
    assert "non-edge" in verify_paths(ps).kinds()


def test_gallai_examples():
    s = star(3)
    res = gallai(s, {1, 2, 3}, 1)
    assert res.found and len(res.paths.paths) == 1
    res = gallai(s, {1, 2, 3}, 2)
    assert not res.found and res.hitting_set == frozenset({0})
    two = Graph(4, [(0, 1), (2, 3)])
    assert len(max_disjoint_apaths(two, {0, 1, 2, 3}, 2)) == 2


def test_prop_threshold():
    assert prop_threshold(2, 3) == 9
    g = path(6)
    ps = disjoint_apaths_bounded_degree(g, {0, 5}, 1)
    assert len(ps.paths) == 1 and verify_paths(ps).ok
    with pytest.raises(UsageError):
        disjoint_apaths_bounded_degree(g, {0, 1, 2}, 2)


def test_induced_menger_examples():
    p5 = path(5)
    res = induced_menger(p5, {0}, {4}, 1)
    assert res.paths == [(0, 1, 2, 3, 4)]
    res = induced_menger(p5, {0}, {4}, 2)
    assert res.paths is None and len(res.separator) == 1
    # two parallel P4s from x to y
    h = Graph(8, [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7)])
    res = induced_menger(h, {0, 4}, {3, 7}, 2)
    assert res.paths is not None and len(res.paths) == 2


def test_f_a_base_case():
    for delta in range(1, 8):
        assert f_a(1, delta) == 2
    assert f_a(2, 3) > f_a(1, 3)


def test_anti_complete_examples():
    g = Graph(3, [(0, 1), (1, 2)])
    ps, _ = anti_complete_apaths(g, {0, 2}, 1)
    assert ps.paths == ((0, 1, 2),)
    # two P3s joined by one long path
    edges = [(0, 1), (1, 2), (3, 4), (4, 5)] + [(1, 6), (6, 7), (7, 8), (8, 9), (9, 4)]
    g = Graph(10, edges)
    ps, trace = anti_complete_apaths(g, {0, 2, 3, 5}, 2)
    assert len(ps.paths) == 2 and verify_paths(ps).ok and trace
    with pytest.raises(APathsFailure) as info:
        anti_complete_apaths(star(6), set(range(1, 7)), 2)
    assert info.value.trace


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3))
def test_anti_complete_on_trees(seed, d):
    g = tree(160, seed, max_degree=3)
    leaves = [v for v in range(g.n) if g.degree(v) == 1]
    if len(leaves) < f_a(d, g.max_degree()):
        return
    ps, _ = anti_complete_apaths(g, leaves, d)
    assert len(ps.paths) == d and verify_paths(ps).ok


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 100_000))
def test_prop_on_random_cubic(seed):
    g = random_bounded_degree(30, 3, seed, connected=True)
    terms = sorted(int(x) for x in rng(seed).choice(g.n, 9, replace=False))
    ps = disjoint_apaths_bounded_degree(g, terms, 2)
    assert len(ps.paths) == 2 and verify_paths(ps).ok
