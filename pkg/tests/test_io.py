import pytest
from hypothesis import given, settings, strategies as st

from bakertw import io
from bakertw.apaths import PathSystem
from bakertw.asdim import band_compose
from bakertw.errors import GraphFormatError
from bakertw.families import (
    JumpSpec, apex_girth_construction, complete, default_apex_base, gnp, grid, jump_grid, path, subdivide,
)
from bakertw.graph import bfs_layering, forest_layering
from bakertw.models import FatMinorModel, fat_from_induced, find_induced_minor, identity_model
from bakertw.treewidth import treewidth_upper, verify_decomposition


def _labelled_graphs():
    spec = JumpSpec(6, 3, ((1, 3), (4, 6)))
    base, marked = default_apex_base(2)
    return [grid(4), jump_grid(spec), subdivide(jump_grid(spec), 1),
            apex_girth_construction(base, marked, 2), path(1), complete(0)]


@pytest.mark.parametrize("g", _labelled_graphs(), ids=lambda g: f"n{g.n}")
def test_graph_round_trip(g):
    text = io.graph_to_text(g)
    assert io.graph_from_text(text) == g
    assert io.graph_to_text(io.graph_from_text(text)) == text


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 25), st.floats(0, 1), st.integers(0, 10_000))
def test_graph_round_trip_random(n, p, seed):
    g = gnp(n, p, seed)
    assert io.graph_from_text(io.graph_to_text(g)) == g
    lay = forest_layering(g)
    assert io.layering_from_text(io.layering_to_text(lay)).layers == lay.layers
    td = treewidth_upper(g).decomposition
    back, n2 = io.td_from_text(io.td_to_text(td, g.n))
    assert back == td and n2 == g.n and verify_decomposition(g, back).ok


@pytest.mark.parametrize("text,line", [
    ("p graph 3 1\ne 0 3\n", 2),
    ("e 0 1\n", 1),
    ("p graph 3 1\ne 0 x\n", 2),
    ("p graph 2 0\nq\n", 2),
    ("p graph 2 1\nc label coord 0 1\ne 0 1\n", 2),
    ("p graph 2 1\ne 1 1\n", 2),
])
def test_graph_errors_carry_lines(text, line):
    with pytest.raises(GraphFormatError) as info:
        io.graph_from_text(text)
    assert info.value.line == line and f"line {line}" in str(info.value)


def test_graph_edge_count_mismatch():
    with pytest.raises(GraphFormatError):
        io.graph_from_text("p graph 3 2\ne 0 1\n")


def test_comments_ignored():
    g = io.graph_from_text("c hello\np graph 2 1\nc another\ne 0 1\n")
    assert g.edges == ((0, 1),)


def test_td_errors():
    with pytest.raises(GraphFormatError) as info:
        io.td_from_text("s td 1 2 2\nb 1 1 3\n")
    assert info.value.line == 2


def test_model_round_trip():
    m = find_induced_minor(grid(3), complete(3))
    back = io.model_from_json(io.model_to_json(m))
    assert back == m
    h = complete(2)
    fat = fat_from_induced(identity_model(subdivide(h, 3)), h, 1)
    back = io.model_from_json(io.model_to_json(fat))
    assert isinstance(back, FatMinorModel) and back == fat


def test_model_file_reference(tmp_path):
    g = grid(3)
    io.write_graph(g, tmp_path / "g.txt")
    (tmp_path / "m.json").write_text(
        '{"pattern": "g.txt", "host": "g.txt", "flavour": "induced", "branch": {'
        + ", ".join(f'"{v}": [{v}]' for v in range(9)) + "}}")
    m = io.read_model(tmp_path / "m.json")
    assert m == identity_model(g)


def test_bad_json_reports_line():
    with pytest.raises(GraphFormatError) as info:
        io.model_from_json('{\n "pattern": ,\n}')
    assert info.value.line == 2


def test_paths_and_partition_round_trip():
    g = path(5)
    ps = PathSystem(g, ((0, 1, 2), (4, 3)), frozenset({0, 2, 3, 4}), "anti_complete")
    assert io.paths_from_json(io.paths_to_json(ps, True), g) == ps
    part = band_compose(grid(6), bfs_layering(grid(6), 0), 2)
    back = io.partition_from_json(io.partition_to_json(part))
    assert back == part


def test_csv_round_trip():
    rows = [{"instance": "a,b", "problem": "mis", "eps": "1/2", "k": 2, "value": 8, "opt": None,
             "ratio": None, "millis": 3}]
    text = io.csv_rows(rows, io.PTAS_COLUMNS)
    assert "\r" not in text
    back = io.read_csv(text)
    assert back[0]["instance"] == "a,b" and back[0]["opt"] == ""
