"""Command line front end: ``bakertw <subcommand> ...``.

Exit codes: 0 success, 1 verification failure or negative answer, 2 usage
or parse error, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import asdim, baker, extractor, families, fixtures, io, models
from .apaths import APathsFailure, anti_complete_apaths, disjoint_apaths_bounded_degree, verify_paths
from .errors import BudgetExhausted, GraphFormatError, UsageError
from .graph import Layering, bfs_layering, forest_layering, is_layering

FAMILIES = ["grid", "jump-grid", "crossing-grid", "apex", "complete", "path", "cycle", "star",
            "empty", "tree", "random-bounded-degree", "gnp", "theta-ladder"]


class _Fail(Exception):
    """Verification failed or the answer is negative (exit 1)."""


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        io._write(out, text)


def _ids(text: str) -> list[int]:
    """Inline ids ``1,2,5`` or a file of whitespace-separated ids."""
    p = Path(text)
    raw = p.read_text() if p.exists() else text.replace(",", " ")
    try:
        return [int(x) for x in raw.split()]
    except ValueError:
        raise UsageError(f"bad id list {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad integer list {text!r}") from None


def _layering(g, spec: str | None) -> Layering:
    """``bfs:<root>``, ``forest`` or a layering file; defaults to ``forest``."""
    if spec is None or spec == "forest":
        lay = forest_layering(g)
    elif spec.startswith("bfs:"):
        try:
            root = int(spec[4:])
        except ValueError:
            raise UsageError(f"bad root in {spec!r}") from None
        lay = bfs_layering(g, root)
    else:
        lay = io.layering_from_text(Path(spec).read_text())
        if not is_layering(g, lay):
            raise UsageError(f"{spec} is not a layering of the graph")
    return lay


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_generate(a) -> int:
    fam = a.family
    if fam == "grid":
        g = families.grid(a.k)
    elif fam == "jump-grid":
        jumps = []
        for part in (a.jumps or "").split(","):
            if part.strip():
                x, y = part.split(":")
                jumps.append((int(x), int(y)))
        spec = families.JumpSpec(a.k, a.b if a.b is not None else max(len(jumps), 1), tuple(jumps))
        spec.validate()
        g = families.jump_grid(spec)
    elif fam == "crossing-grid":
        g = families.crossing_grid(a.k)
    elif fam == "apex":
        base, marked = families.default_apex_base(a.k)
        g = families.apex_girth_construction(base, marked, a.g)
    elif fam in ("complete", "path", "cycle", "star", "empty"):
        g = families.stock(fam, a.n)
    elif fam == "tree":
        g = families.tree(a.n, a.seed, a.max_degree)
    elif fam == "random-bounded-degree":
        g = families.random_bounded_degree(a.n, a.max_degree or 3, a.seed, a.p, a.connected)
    elif fam == "gnp":
        g = families.gnp(a.n, a.p, a.seed)
    else:
        fx = fixtures.theta_ladder(a.d, funnel=a.funnel)
        g = fx.graph
        if a.grid_model_out:
            io._write(a.grid_model_out, io.model_to_json(fx.grid_model))
        print(f"c fixture {fx.name} root={fx.layering.root} z={fx.z} ell={fx.ell}", file=sys.stderr)
    if a.subdivide:
        g = families.subdivide(g, a.subdivide)
    text = io.graph_to_text(g)
    assert io.graph_from_text(text) == g
    _emit(text, a.out)
    return 0


def cmd_layering(a) -> int:
    g = io.read_graph(a.graph)
    lay = _layering(g, f"bfs:{a.root}" if a.root is not None else "forest")
    if lay.restricted:
        print(f"warning: graph is disconnected; only the component of {a.root} was layered", file=sys.stderr)
    _emit(io.layering_to_text(lay), a.out)
    return 0


def cmd_baker_profile(a) -> int:
    g = io.read_graph(a.graph)
    lay = _layering(g, a.layering)
    prof = baker.baker_profile(g, lay, a.ell_max, a.mode, a.cap, a.budget)
    rows = [{"ell": e.ell, "width": e.width, "lower": e.lower, "exact": int(e.exact),
             "worst_window": e.worst_window} for e in prof.entries]
    _emit(io.csv_rows(rows, ["ell", "width", "lower", "exact", "worst_window"]), a.out)
    return 0


def cmd_ptas(a) -> int:
    g = io.read_graph(a.graph)
    lay = _layering(g, a.layering)
    t0 = time.perf_counter()
    res = baker.ptas(g, lay, a.eps, a.problem, a.max_width, oracle=a.oracle)
    millis = int(round((time.perf_counter() - t0) * 1000))
    row = {"instance": a.instance or Path(a.graph).stem, "problem": res.problem, "eps": str(res.eps),
           "k": res.k, "value": res.value, "opt": res.opt,
           "ratio": None if res.ratio is None else f"{res.ratio:.6f}",
           "millis": None if a.no_timing else millis}
    if a.csv:
        io.append_csv(a.csv, [row], io.PTAS_COLUMNS)
    else:
        sys.stdout.write(io.csv_rows([row], io.PTAS_COLUMNS))
    if res.opt is not None and not baker.guarantee_holds(res):
        raise _Fail(f"approximation guarantee violated: value {res.value}, optimum {res.opt}")
    return 0


def cmd_apaths(a) -> int:
    g = io.read_graph(a.graph)
    terms = _ids(a.terminals)
    if a.mode == "disjoint":
        ps = disjoint_apaths_bounded_degree(g, terms, a.d, a.budget)
    else:
        ps, trace = anti_complete_apaths(g, terms, a.d, budget=a.budget)
        for line in trace:
            print(line, file=sys.stderr)
    verdict = verify_paths(ps)
    if not verdict.ok or len(ps.paths) < a.d:
        raise _Fail("path system failed verification: " + verdict.describe())
    _emit(io.paths_to_json(ps, True), a.out)
    return 0


def cmd_extract(a) -> int:
    g = io.read_graph(a.graph)
    lay = bfs_layering(g, a.root)
    try:
        z, ell = (int(x) for x in a.window.split(":"))
    except ValueError:
        raise UsageError("window must be z:ell") from None
    if a.relaxed:
        k3 = a.k3 if a.k3 is not None else max(2, 2 * a.d)
        c = extractor.ExtractionConstants.relaxed_mode(a.d, g.max_degree(), ell, a.k1, k3)
    else:
        c = extractor.constants(a.d, g.max_degree(), ell)
    if a.grid_model.startswith("search:"):
        if not isinstance(c.side, int):
            raise UsageError("constants are symbolic; use --relaxed")
        window = lay.window(z, ell)
        gm = extractor.search_grid_model(g, window, c.side, int(a.grid_model[7:]))
    else:
        gm = io.read_model(a.grid_model)
        if gm.host != g:
            gm = models.MinorModel(gm.pattern, g, gm.branch, gm.flavour)
    ex = extractor.extract_jump_grid(g, lay, z, ell, gm, c, a.budget)
    trace_text = "\n".join(ex.trace) + "\n"
    if a.trace:
        io._write(a.trace, trace_text)
    else:
        sys.stderr.write(trace_text)
    verdict = models.verify_model(ex.model)
    if not verdict.ok:
        raise _Fail("extracted model failed verification: " + verdict.describe())
    _emit(io.model_to_json(ex.model), a.out)
    return 0


def cmd_verify_model(a) -> int:
    m = io.read_model(a.model)
    if isinstance(m, models.FatMinorModel):
        verdict = models.verify_fat_model(m)
    else:
        verdict = models.verify_model(m)
    if verdict.ok:
        print("ok")
        return 0
    print("violations")
    print(verdict.describe())
    return 1


def cmd_asdim(a) -> int:
    g = io.read_graph(a.graph)
    lay = _layering(g, a.layering)
    deltas = _int_list(a.delta_list)
    if a.measure:
        table = asdim.measure_control(g, deltas, a.classes, lay)
        rows = [{"delta": d, "classes": a.classes, "D": "inf" if D == asdim.INF else D} for d, D in table]
        _emit(io.csv_rows(rows, ["delta", "classes", "D"]), a.out)
        return 0
    if len(deltas) != 1:
        raise UsageError("give a single delta unless --measure is set")
    base = asdim.BASES[a.base]
    p = asdim.band_compose(g, lay, deltas[0], base)
    verdict = asdim.verify_control(g, p)
    if not verdict.ok:
        raise _Fail(verdict.describe())
    _emit(io.partition_to_json(p), a.out)
    return 0


def cmd_clustered(a) -> int:
    g = io.read_graph(a.graph)
    col = asdim.clustered_search(g, a.k, a.c, a.budget)
    if col is None:
        print(f"no {a.k}-colouring with clusters of size <= {a.c} exists")
        return 1
    _emit(json.dumps({"k": col.k, "c": col.c, "colour": col.colour}) + "\n", a.out)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bakertw", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0, help="seed for random families")
    p.add_argument("--budget", type=int, default=None, help="node cap for brute-force searches")
    p.add_argument("--config", help="file of key=value defaults (flags win)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a graph file")
    g.add_argument("family", choices=FAMILIES)
    g.add_argument("--k", type=int, default=5)
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--b", type=int)
    g.add_argument("--jumps", help="a:a' pairs, comma separated")
    g.add_argument("--g", type=int, default=3, help="path length for the apex construction")
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--p", type=float, default=0.3)
    g.add_argument("--max-degree", type=int)
    g.add_argument("--connected", action="store_true")
    g.add_argument("--funnel", action="store_true")
    g.add_argument("--subdivide", type=int, default=0)
    g.add_argument("--grid-model-out")
    g.add_argument("-o", "--out")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("layering", help="BFS layering file")
    s.add_argument("--graph", required=True)
    s.add_argument("--root", type=int)
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_layering)

    s = sub.add_parser("baker-profile", help="window treewidth per window length")
    s.add_argument("--graph", required=True)
    s.add_argument("--layering")
    s.add_argument("--ell-max", type=int, default=3)
    s.add_argument("--mode", choices=["exact", "heuristic"], default="exact")
    s.add_argument("--cap", type=int)
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_baker_profile)

    s = sub.add_parser("ptas", help="layer-shifting approximation")
    s.add_argument("--graph", required=True)
    s.add_argument("--problem", choices=["mis", "mvc", "mds"], required=True)
    s.add_argument("--eps", required=True)
    s.add_argument("--layering")
    s.add_argument("--max-width", type=int)
    s.add_argument("--oracle", action="store_true", help="also compute the exact optimum")
    s.add_argument("--instance")
    s.add_argument("--csv", help="append the row to this CSV file")
    s.add_argument("--no-timing", action="store_true", help="leave millis empty (byte-stable output)")
    s.set_defaults(func=cmd_ptas)

    s = sub.add_parser("apaths", help="disjoint or anti-complete A-paths")
    s.add_argument("--graph", required=True)
    s.add_argument("--terminals", required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--mode", choices=["disjoint", "anticomplete"], default="anticomplete")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_apaths)

    s = sub.add_parser("extract-jumpgrid", help="jump-grid extraction from a grid model in a window")
    s.add_argument("--graph", required=True)
    s.add_argument("--root", type=int, required=True)
    s.add_argument("--window", required=True, help="z:ell")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--grid-model", required=True, help="model file or search:<budget>")
    s.add_argument("--relaxed", action="store_true")
    s.add_argument("--k1", type=int, default=4)
    s.add_argument("--k3", type=int)
    s.add_argument("--trace")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("verify-model", help="check a model file")
    s.add_argument("--model", required=True)
    s.set_defaults(func=cmd_verify_model)

    s = sub.add_parser("asdim", help="control partitions")
    s.add_argument("--graph", required=True)
    s.add_argument("--layering")
    s.add_argument("--delta-list", default="1")
    s.add_argument("--classes", type=int, default=3)
    s.add_argument("--measure", action="store_true")
    s.add_argument("--base", choices=sorted(asdim.BASES), default="bounded-tw")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_asdim)

    s = sub.add_parser("clustered", help="clustered colouring search")
    s.add_argument("--graph", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--c", type=int, required=True)
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_clustered)
    return p


def _read_config(path: str) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise GraphFormatError("config lines must be key=value", lineno)
        key, val = line.split("=", 1)
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        if args.config:
            conf = _read_config(args.config)
            sub = parser._subparsers._group_actions[0].choices[args.command]
            for target in (parser, sub):
                known = {a.dest: a for a in target._actions}
                vals = {}
                for k, v in conf.items():
                    if k not in known or k == "command":
                        continue
                    if isinstance(known[k], argparse._StoreTrueAction):
                        v = v.lower() in ("1", "true", "yes", "on")
                    vals[k] = v
                target.set_defaults(**vals)
            args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (GraphFormatError, UsageError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExhausted as exc:
        print(f"budget exhausted after {exc.nodes} nodes: {exc}", file=sys.stderr)
        return 3
    except extractor.ExtractionError as exc:
        print(f"extraction failed ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 1
    except APathsFailure as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1
    except _Fail as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
