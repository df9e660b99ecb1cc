import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bakertw.errors import BudgetExhausted, UsageError
from bakertw.families import (
    JumpSpec, complete, crossing_grid, cycle, empty, gnp, grid, jump_grid, path, subdivide,
)
from bakertw.graph import Graph
from bakertw.models import (
    FatMinorModel, MinorModel, clique_minor_in_jump_grid, clique_routing, compose, fat_from_induced,
    find_induced_minor, find_minor, identity_model, induced_minor_via_subdivision, jump_budget,
    minor_from_fat, verify_fat_model, verify_model,
)


def test_verify_model_examples():
    g = grid(3)
    assert verify_model(identity_model(g)).ok
    c6 = cycle(6)
    k3 = MinorModel(complete(3), c6, {0: {0, 1}, 1: {2, 3}, 2: {4, 5}})
    assert verify_model(k3).ok
    bad = MinorModel(complete(3), c6, {0: {0, 1}, 1: {1, 2, 3}, 2: {4, 5}})
    assert "disjointness" in verify_model(bad).kinds()
    with pytest.raises(UsageError):
        verify_model(MinorModel(complete(2), c6, {0: {0}, 1: {9}}))


def test_induced_flavour_rejects_extra_adjacency():
    m = MinorModel(path(3), cycle(3), {0: {0}, 1: {1}, 2: {2}})
    assert "anti-completeness" in verify_model(m).kinds()
    m.flavour = "plain"
    assert verify_model(m).ok


def test_fat_model_examples():
    p5 = path(5)
    fat = FatMinorModel(complete(2), p5, 3, {0: {0}, 1: {4}}, {(0, 1): set(range(5))})
    assert verify_fat_model(fat).ok
    fat5 = FatMinorModel(complete(2), p5, 5, {0: {0}, 1: {4}}, {(0, 1): set(range(5))})
    assert "F2" in verify_fat_model(fat5).kinds()


def test_fat_r1_gives_minor():
    p5 = path(5)
    fat = FatMinorModel(complete(2), p5, 1, {0: {0}, 1: {4}}, {(0, 1): set(range(5))})
    plain = minor_from_fat(fat)
    assert verify_model(plain).ok


def test_brute_force_search_examples():
    g = grid(3)
    assert find_induced_minor(g, Graph(1)) is not None
    assert verify_model(find_induced_minor(g, cycle(4))).ok
    assert verify_model(find_induced_minor(g, complete(3))).ok
    assert find_minor(grid(3), complete(5)) is None
    assert find_induced_minor(path(3), complete(4)) is None


def test_budget_is_reported():
    with pytest.raises(BudgetExhausted):
        find_minor(grid(5), complete(5), budget=50)


def test_compose_models():
    inner = find_induced_minor(grid(4), cycle(6))
    outer = MinorModel(complete(3), cycle(6), {0: {0, 1}, 1: {2, 3}, 2: {4, 5}})
    m = compose(outer, inner)
    assert m.host is inner.host and verify_model(m).ok


def test_fat_from_induced_identity():
    h = complete(2)
    p5 = subdivide(h, 3)
    fat = fat_from_induced(identity_model(p5), h, 1)
    assert verify_fat_model(fat).ok and fat.r == 1
    h3 = complete(3)
    c12 = subdivide(h3, 3)
    assert verify_fat_model(fat_from_induced(identity_model(c12), h3, 1)).ok


def _small_patterns():
    out = [Graph(1), complete(2), path(3), complete(3), cycle(4), path(4)]
    out.append(Graph(4, [(0, 1), (0, 2), (0, 3)]))
    out.append(Graph(3, [(0, 1)]))
    return out


@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("h", _small_patterns(), ids=lambda h: f"n{h.n}m{h.m}")
def test_fat_from_induced_on_found_models(h, r):
    pattern = subdivide(h, 3 * r)
    host = subdivide(h, 3 * r + 1) if h.m else grid(3)
    found = find_induced_minor(host, pattern)
    assert found is not None
    if h.m >= h.n:  # a longer cycle forces a contracted branch set
        assert max(len(b) for b in found.branch.values()) > 1
    for m in (identity_model(pattern), found):
        fat = fat_from_induced(m, h, r)
        assert verify_fat_model(fat).ok


def test_clique_routing_budget():
    spec = JumpSpec(8, 4, ((1, 3), (4, 6), (5, 8)))
    j = jump_grid(spec)
    for t in (3, 4, 5):
        m = clique_minor_in_jump_grid(j, t)
        assert m is not None and verify_model(m).ok
        assert jump_budget(t) <= spec.d
    assert clique_minor_in_jump_grid(jump_grid(JumpSpec(6, 3, ())), 5) is None
    assert clique_routing(JumpSpec(6, 3, ()), 3) is not None


def test_induced_minor_via_subdivision_examples():
    sub_j = subdivide(jump_grid(JumpSpec(6, 3, ((2, 5),))), 1)
    for h in (complete(5), empty(5), path(3), cycle(5)):
        m = induced_minor_via_subdivision(sub_j, h)
        assert m is not None and verify_model(m).ok


def test_crossing_grid_minors():
    assert find_induced_minor(crossing_grid(3), subdivide(complete(5), 1), budget=None) is None
    assert find_minor(crossing_grid(3), complete(4)) is not None
    assert find_minor(crossing_grid(4), complete(5)) is not None


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.floats(0.2, 0.9), st.integers(0, 10_000))
def test_found_models_verify(n, p, seed):
    h = gnp(n, p, seed)
    host = gnp(9, 0.45, seed + 1)
    for induced in (True, False):
        try:
            m = find_minor(host, h) if not induced else find_induced_minor(host, h)
        except BudgetExhausted:
            continue
        if m is not None:
            assert verify_model(m).ok
            assert m.flavour == ("induced" if induced else "plain")
