"""Text and JSON formats: graphs, layerings, tree decompositions, models, path systems, partitions, CSV."""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path
from typing import Iterable

from .apaths import PathSystem
from .asdim import ControlPartition
from .errors import GraphFormatError, UsageError
from .families import JumpSpec, SubdivisionMap
from .graph import INF, Graph, Layering
from .models import FatMinorModel, MinorModel
from .treewidth import TreeDecomposition

# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------
#
#   p graph <n> <m>
#   e <u> <v>                       0-based, u < v, sorted
#   c label coord <v> <a> <b>
#   c label jumpspec <k> <b> [<a> <a'>]...
#   c label apex <v>
#   c label subdivision <base_n>
#   c label subpath <u> <v> [<s>]...
#
# Any other ``c`` line is a comment. Label lines may appear anywhere after
# the header.


def _label_lines(g: Graph) -> list[str]:
    out = []
    coords = g.labels.get("coord")
    if coords:
        for v in sorted(coords):
            a, b = coords[v]
            out.append(f"c label coord {v} {a} {b}")
    spec = g.labels.get("jumpspec")
    if spec is not None:
        flat = " ".join(f"{a} {a2}" for a, a2 in spec.jumps)
        out.append(f"c label jumpspec {spec.k} {spec.b} {flat}".rstrip())
    if "apex" in g.labels:
        out.append(f"c label apex {g.labels['apex']}")
    sub = g.labels.get("subdivision")
    if sub is not None:
        out.append(f"c label subdivision {sub.base_n}")
        for (u, v), inner in sub.paths:
            out.append(" ".join(["c label subpath", str(u), str(v), *map(str, inner)]))
    unknown = set(g.labels) - {"coord", "jumpspec", "apex", "subdivision"}
    if unknown:
        raise UsageError(f"labels {sorted(unknown)} have no text form")
    return out


def graph_to_text(g: Graph) -> str:
    lines = [f"p graph {g.n} {g.m}"]
    lines += _label_lines(g)
    lines += [f"e {u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def _ints(parts: list[str], lineno: int) -> list[int]:
    try:
        return [int(x) for x in parts]
    except ValueError:
        raise GraphFormatError(f"expected integers, got {' '.join(parts)!r}", lineno) from None


def graph_from_text(text: str) -> Graph:
    n = m = None
    edges: list[tuple[int, int]] = []
    coords: dict[int, tuple[int, int]] = {}
    labels: dict = {}
    sub_base = None
    subpaths: list = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        parts = line.split()
        if not parts:
            continue
        tag = parts[0]
        if tag == "c":
            if len(parts) >= 2 and parts[1] == "label":
                if n is None:
                    raise GraphFormatError("label before header", lineno)
                if len(parts) < 3:
                    raise GraphFormatError("label line without a key", lineno)
                key, vals = parts[2], _ints(parts[3:], lineno)
                if key == "coord" and len(vals) == 3:
                    coords[vals[0]] = (vals[1], vals[2])
                elif key == "jumpspec" and len(vals) >= 2 and len(vals) % 2 == 0:
                    pairs = tuple(zip(vals[2::2], vals[3::2]))
                    labels["jumpspec"] = JumpSpec(vals[0], vals[1], pairs)
                elif key == "apex" and len(vals) == 1:
                    labels["apex"] = vals[0]
                elif key == "subdivision" and len(vals) == 1:
                    sub_base = vals[0]
                elif key == "subpath" and len(vals) >= 2:
                    subpaths.append(((vals[0], vals[1]), tuple(vals[2:])))
                else:
                    raise GraphFormatError(f"malformed label {line!r}", lineno)
            continue
        if tag == "p":
            if n is not None:
                raise GraphFormatError("second header", lineno)
            if len(parts) != 4 or parts[1] != "graph":
                raise GraphFormatError("header must be 'p graph <n> <m>'", lineno)
            n, m = _ints(parts[2:], lineno)
            if n < 0 or m < 0:
                raise GraphFormatError("negative count in header", lineno)
            continue
        if tag == "e":
            if n is None:
                raise GraphFormatError("edge before header", lineno)
            if len(parts) != 3:
                raise GraphFormatError("edge line must be 'e <u> <v>'", lineno)
            u, v = _ints(parts[1:], lineno)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"vertex out of range 0..{n - 1}", lineno)
            if u == v:
                raise GraphFormatError(f"loop at vertex {u}", lineno)
            edges.append((u, v))
            continue
        raise GraphFormatError(f"unknown line type {tag!r}", lineno)
    if n is None:
        raise GraphFormatError("missing 'p graph' header", 1)
    if len(edges) != m:
        raise GraphFormatError(f"header promises {m} edges, found {len(edges)}", None)
    if len({(min(e), max(e)) for e in edges}) != len(edges):
        raise GraphFormatError("duplicate edge", None)
    if coords:
        labels["coord"] = coords
    if sub_base is not None:
        labels["subdivision"] = SubdivisionMap(sub_base, tuple(subpaths))
    elif subpaths:
        raise GraphFormatError("subpath labels without a subdivision label", None)
    return Graph(n, edges, labels)


def read_graph(path) -> Graph:
    return graph_from_text(Path(path).read_text())


def write_graph(g: Graph, path) -> None:
    _write(path, graph_to_text(g))


def _write(path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# Layerings: one line per layer, ids separated by spaces (empty line = empty layer)
# ---------------------------------------------------------------------------

def layering_to_text(lay: Layering) -> str:
    return "".join(" ".join(map(str, sorted(layer))) + "\n" for layer in lay.layers)


def layering_from_text(text: str) -> Layering:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    layers = []
    for lineno, line in enumerate(lines, start=1):
        if line.startswith("#"):
            continue
        layers.append(_ints(line.split(), lineno))
    return Layering.explicit(layers)


# ---------------------------------------------------------------------------
# Tree decompositions (PACE .td: 1-based bag ids and vertices)
# ---------------------------------------------------------------------------

def td_to_text(td: TreeDecomposition, n: int) -> str:
    lines = [f"s td {len(td.bags)} {td.width + 1} {n}"]
    for i, bag in enumerate(td.bags, start=1):
        lines.append(" ".join(["b", str(i), *(str(v + 1) for v in sorted(bag))]))
    lines += [f"{a + 1} {b + 1}" for a, b in td.tree_edges]
    return "\n".join(lines) + "\n"


def td_from_text(text: str) -> tuple[TreeDecomposition, int]:
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "s":
            if header is not None or len(parts) != 5 or parts[1] != "td":
                raise GraphFormatError("header must be 's td <bags> <width+1> <n>'", lineno)
            header = _ints(parts[2:], lineno)
        elif parts[0] == "b":
            if header is None:
                raise GraphFormatError("bag before header", lineno)
            vals = _ints(parts[1:], lineno)
            if not vals or not (1 <= vals[0] <= header[0]) or vals[0] in bags:
                raise GraphFormatError("bad or repeated bag id", lineno)
            if any(not (1 <= v <= header[2]) for v in vals[1:]):
                raise GraphFormatError("bag vertex out of range", lineno)
            bags[vals[0]] = frozenset(v - 1 for v in vals[1:])
        else:
            if header is None:
                raise GraphFormatError("tree edge before header", lineno)
            vals = _ints(parts, lineno)
            if len(vals) != 2 or not all(1 <= x <= header[0] for x in vals):
                raise GraphFormatError("tree edge must name two bag ids", lineno)
            edges.append((vals[0] - 1, vals[1] - 1))
    if header is None:
        raise GraphFormatError("missing 's td' header", 1)
    if len(bags) != header[0]:
        raise GraphFormatError(f"header promises {header[0]} bags, found {len(bags)}")
    td = TreeDecomposition(tuple(bags[i] for i in range(1, header[0] + 1)), tuple(edges))
    if td.width + 1 != header[1] and header[0] > 0:
        raise GraphFormatError(f"header width+1 is {header[1]} but largest bag has {td.width + 1}")
    return td, header[2]


# ---------------------------------------------------------------------------
# JSON artifacts
# ---------------------------------------------------------------------------
#
# A graph reference is either an inline object {"n", "edges", "labels"} where
# ``labels`` holds the label lines of the text format, or a string naming a
# graph file (relative to the JSON file).

def graph_to_ref(g: Graph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.edges], "labels": _label_lines(g)}


def graph_from_ref(ref, base: Path | None = None) -> Graph:
    if isinstance(ref, str):
        p = Path(ref)
        if base is not None and not p.is_absolute():
            p = base / p
        return read_graph(p)
    try:
        n, edges = int(ref["n"]), ref["edges"]
        lines = [f"p graph {n} {len(edges)}", *ref.get("labels", [])]
        lines += [f"e {u} {v}" for u, v in edges]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"bad graph reference: {exc}") from None
    return graph_from_text("\n".join(lines) + "\n")


def _dump(obj) -> str:
    return json.dumps(obj) + "\n"


def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(exc.msg, exc.lineno) from None


def model_to_json(m) -> str:
    obj: dict = {"pattern": graph_to_ref(m.pattern), "host": graph_to_ref(m.host)}
    if isinstance(m, FatMinorModel):
        obj["flavour"] = "fat"
        obj["r"] = m.r
        obj["branch"] = {str(v): sorted(s) for v, s in sorted(m.vertex_branch.items())}
        obj["edge_branch"] = {f"{u}-{v}": sorted(s) for (u, v), s in sorted(m.edge_branch.items())}
    else:
        obj["flavour"] = m.flavour
        obj["branch"] = {str(v): sorted(s) for v, s in sorted(m.branch.items())}
    return _dump(obj)


def model_from_json(text: str, base: Path | None = None):
    obj = _load(text)
    try:
        pattern = graph_from_ref(obj["pattern"], base)
        host = graph_from_ref(obj["host"], base)
        flavour = obj["flavour"]
        branch = {int(v): frozenset(s) for v, s in obj["branch"].items()}
        if flavour == "fat":
            eb = {}
            for key, s in obj.get("edge_branch", {}).items():
                u, v = key.split("-")
                eb[(int(u), int(v))] = frozenset(s)
            return FatMinorModel(pattern, host, int(obj["r"]), branch, eb)
        return MinorModel(pattern, host, branch, flavour)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GraphFormatError):
            raise
        raise GraphFormatError(f"bad model file: {exc}") from None


def read_model(path):
    p = Path(path)
    return model_from_json(p.read_text(), p.parent)


def paths_to_json(ps: PathSystem, verified: bool) -> str:
    mode = "disjoint" if ps.mode == "vertex_disjoint" else "anticomplete"
    return _dump({"paths": [list(p) for p in ps.paths], "mode": mode,
                  "terminals": sorted(ps.terminals), "verified": verified})


def paths_from_json(text: str, host: Graph) -> PathSystem:
    obj = _load(text)
    try:
        mode = {"disjoint": "vertex_disjoint", "anticomplete": "anti_complete"}[obj["mode"]]
        return PathSystem(host, tuple(tuple(p) for p in obj["paths"]), frozenset(obj.get("terminals", [])), mode)
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"bad path system: {exc}") from None


def _num(x):
    return None if x == INF else x


def partition_to_json(p: ControlPartition) -> str:
    classes = [sorted(sorted(s) for s in cls) for cls in p.classes]
    return _dump({"delta": p.delta, "D": _num(p.D), "classes": classes})


def partition_from_json(text: str) -> ControlPartition:
    obj = _load(text)
    try:
        D = INF if obj["D"] is None else int(obj["D"])
        classes = [[frozenset(s) for s in cls] for cls in obj["classes"]]
        return ControlPartition(classes, int(obj["delta"]), D)
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"bad partition: {exc}") from None


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

PTAS_COLUMNS = ["instance", "problem", "eps", "k", "value", "opt", "ratio", "millis"]


def csv_rows(rows: Iterable[dict], columns: list[str], header: bool = True) -> str:
    buf = _io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="raise")
    if header:
        w.writeheader()
    for row in rows:
        w.writerow({c: "" if row.get(c) is None else row[c] for c in columns})
    return buf.getvalue()


def append_csv(path, rows: Iterable[dict], columns: list[str]) -> None:
    p = Path(path)
    fresh = not p.exists() or p.stat().st_size == 0
    with open(p, "a", newline="") as fh:
        fh.write(csv_rows(rows, columns, header=fresh))


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(_io.StringIO(text)))
