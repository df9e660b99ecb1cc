"""Jump-grid extraction from a layered graph with a grid model inside a window of layers.

The pipeline follows the standard argument: pick one vertex per block of
the grid model, follow vertical paths towards the root, keep a family of
blocks whose path stubs are far apart, find anti-complete paths between the
stubs above the window, and splice them into a subgrid as jump edges.
Every intermediate claim is asserted, and the final model is verified.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .apaths import APathsFailure, anti_complete_apaths, f_a
from .errors import UsageError
from .families import JumpSpec, grid, grid_id, jump_grid, subdivide
from .graph import Graph, Layering, components, induced_subgraph, is_layering, vertical_path
from .models import MinorModel, find_induced_minor, verify_model


class ExtractionError(RuntimeError):
    step = "extraction"


class NoVerticalExit(ExtractionError):
    step = "vertical-paths"


class InsufficientIndependence(ExtractionError):
    step = "independent-blocks"


class NoJumpPaths(ExtractionError):
    step = "jump-paths"


class PruningExhausted(ExtractionError):
    step = "useful-indices"


Value = int | str


@dataclass(frozen=True)
class ExtractionConstants:
    d: int
    delta: int
    ell: int
    k1: int
    k2: Value
    k3: Value
    k4: Value
    k5: Value
    relaxed: bool = False

    @property
    def side(self) -> int:
        """Side of the grid model the pipeline works in."""
        if not isinstance(self.k4, int):
            raise UsageError("working side is symbolic; supply a separator bound or use relaxed constants")
        return self.k4

    @property
    def degeneracy_bound(self) -> int:
        return 2 * self.delta ** (self.ell + 5) * (self.ell + 2)

    @classmethod
    def relaxed_mode(cls, d: int, delta: int, ell: int, k1: int, k3: int, k2: int | None = None):
        if min(d, delta, ell, k1, k3) < 1:
            raise UsageError("relaxed constants must be positive")
        k2 = 2 * d if k2 is None else k2
        if k2 < 2 * d:
            raise UsageError("need at least 2d independent blocks")
        if k3 < k2:
            raise UsageError("k3 blocks cannot hold k2 independent ones")
        return cls(d, delta, ell, k1, k2, k3, 2 * k1 * k3, f"f_tw({2 * k1 * k3},{delta})", True)


def constants(d: int, delta: int, ell: int, fm=None) -> ExtractionConstants:
    """Strict constants. ``k2`` is symbolic for ``d > 1`` unless a separator bound ``fm`` is given."""
    if min(d, delta, ell) < 1:
        raise UsageError("d, delta and ell must be positive")
    k1 = 2 * d * delta * (ell + 2) + 3
    factor = 2 * delta ** (ell + 5) * (ell + 2) + 1
    if d == 1 or fm is not None:
        k2: Value = f_a(d, delta, 1 if fm is None else fm)
        k3: Value = factor * k2
        k4: Value = 2 * k1 * k3
    else:
        k2 = f"f_A({d},{delta})"
        k3 = f"{factor}*{k2}"
        k4 = f"{2 * k1}*{k3}"
    k5 = f"f_tw({k4},{delta})"
    return ExtractionConstants(d, delta, ell, k1, k2, k3, k4, k5, False)


@dataclass
class Extraction:
    model: MinorModel
    spec: JumpSpec
    trace: list[str]
    blocks: list[int] = field(default_factory=list)
    chosen: list[int] = field(default_factory=list)
    used: list[int] = field(default_factory=list)
    jump_paths: list[tuple[int, ...]] = field(default_factory=list)
    rows: list[int] = field(default_factory=list)
    cols: list[int] = field(default_factory=list)


def _grid_side(pattern: Graph) -> int:
    q = int(round(pattern.n ** 0.5))
    if q * q != pattern.n or pattern.edges != grid(q).edges:
        raise UsageError("grid model pattern is not a square grid")
    return q


def check_grid_model(model: MinorModel, window: set[int]) -> int:
    q = _grid_side(model.pattern)
    if model.flavour != "induced":
        raise UsageError("grid model must be induced")
    verdict = verify_model(model)
    if not verdict.ok:
        raise UsageError(f"grid model does not verify: {verdict.describe()}")
    if not model.support() <= window:
        raise UsageError("grid model leaves the window")
    return q


def search_grid_model(g: Graph, window: set[int], q: int, budget: int) -> MinorModel:
    sub, mapping = induced_subgraph(g, window)
    back = {i: v for v, i in mapping.items()}
    found = find_induced_minor(sub, grid(q), budget=budget)
    if found is None:
        raise UsageError(f"window has no induced ({q} x {q})-grid minor")
    branch = {x: frozenset(back[i] for i in s) for x, s in found.branch.items()}
    return MinorModel(grid(q), g, branch, "induced")


def _closed(g: Graph, vs) -> set[int]:
    return g.closed_neighbourhood(vs)


def _degeneracy(adj: dict[int, set[int]]) -> int:
    adj = {v: set(s) for v, s in adj.items()}
    best = 0
    while adj:
        v = min(adj, key=lambda x: (len(adj[x]), x))
        best = max(best, len(adj[v]))
        for w in adj.pop(v):
            adj[w].discard(v)
    return best


def _greedy_independent(adj: dict[int, set[int]]) -> list[int]:
    adj = {v: set(s) for v, s in adj.items()}
    out = []
    while adj:
        v = min(adj, key=lambda x: (len(adj[x]), x))
        out.append(v)
        for w in adj[v] | {v}:
            for u in adj.pop(w, ()):
                if u in adj:
                    adj[u].discard(w)
    return sorted(out)


def audit_useless(cell, q: int, blocked: set[int]) -> tuple[set[int], set[int]]:
    """Columns and rows of the grid model with some branch set meeting ``blocked``."""
    cols, rows = set(), set()
    for a in range(1, q + 1):
        for b in range(1, q + 1):
            if cell(a, b) & blocked:
                cols.add(a)
                rows.add(b)
    return rows, cols


def extract_jump_grid(g: Graph, lay: Layering, z: int, ell: int, grid_model: MinorModel,
                      c: ExtractionConstants, budget: int | None = 200_000) -> Extraction:
    trace: list[str] = []

    def log(step: str, msg: str):
        trace.append(f"[{step}] {msg}")

    if not is_layering(g, lay) or lay.origin != "bfs" or lay.root is None:
        raise UsageError("need a BFS layering with a root")
    if ell != c.ell:
        raise UsageError(f"window length {ell} differs from constants ell={c.ell}")
    if z < 2:
        raise NoVerticalExit(f"window starts at layer {z} < 2: vertical paths have no room above it")
    if z + ell > len(lay):
        raise UsageError("window runs past the last layer")
    d, k1, k3 = c.d, c.k1, c.k3
    if not isinstance(k3, int) or not isinstance(c.k2, int):
        raise UsageError("constants are symbolic")
    delta = g.max_degree()
    if delta > c.delta:
        raise UsageError(f"max degree {delta} exceeds constants delta={c.delta}")
    window = lay.window(z, ell)
    q0 = check_grid_model(grid_model, window)
    q = c.side
    if q0 < q:
        raise UsageError(f"grid model side {q0} below working side {q}")
    log("setup", f"d={d} D={c.delta} ell={ell} k1={k1} k2={c.k2} k3={k3} side={q} relaxed={c.relaxed} window=L{z}..L{z + ell - 1}")
    log("grid-model", f"verified induced ({q0} x {q0})-grid model inside the window; using the top-left {q} x {q}")
    if c.relaxed:
        log("grid-model", "relaxed constants: block parity kept, magnitudes user-scaled")

    def cell(a: int, b: int) -> frozenset[int]:
        return grid_model.branch[grid_id(q0, a, b)]

    # blocks: column interval i, row interval k3
    evens = list(range(2, 2 * k3 + 1, 2))
    row_range = range((k3 - 1) * k1 + 1, k3 * k1)
    block: dict[int, set[int]] = {}
    cells_of: dict[int, list[tuple[int, int]]] = {}
    for i in evens:
        cells_of[i] = [(a, b) for a in range((i - 1) * k1 + 1, i * k1) for b in row_range]
        block[i] = set().union(*(cell(a, b) for a, b in cells_of[i]))
    log("blocks", f"{len(evens)} blocks at even column intervals {evens}, row interval {k3}")

    # vertical paths and their stubs
    vi, paths, star = {}, {}, {}
    for i in evens:
        v = min(block[i], key=lambda x: (lay.index(x), x))
        p = vertical_path(g, lay, v, 0)
        if p is None or len(p) < 3:
            raise NoVerticalExit(f"block {i}: no vertical path from {v} to the root")
        vi[i], paths[i] = v, p
        star[i] = [x for x in p if z - 2 <= lay.index(x) <= z + ell - 1]
        assert len(star[i]) <= ell + 2
    log("vertical-paths", "P_i stubs over layers z-2..z+ell-1: " + ", ".join(f"{i}:{star[i]}" for i in evens))

    # auxiliary conflict graph and an independent family of blocks
    nstar = {i: _closed(g, star[i]) for i in evens}
    adj: dict[int, set[int]] = {i: set() for i in evens}
    for i in evens:
        for j in evens:
            if i != j and nstar[i] & (nstar[j] | block[j]):
                adj[i].add(j)
                adj[j].add(i)
    degen = _degeneracy(adj)
    assert degen <= c.degeneracy_bound, f"conflict graph {degen}-degenerate, bound {c.degeneracy_bound}"
    log("conflict-graph", f"{sum(len(s) for s in adj.values()) // 2} edges, degeneracy {degen} <= {c.degeneracy_bound}")
    indep = _greedy_independent(adj)
    if len(indep) < c.k2:
        raise InsufficientIndependence(f"independent blocks {len(indep)} < k2={c.k2}")
    log("independent-blocks", f"X' = {indep}")
    for i in indep:
        for j in indep:
            if i != j:
                assert not (nstar[i] & (nstar[j] | block[j])), f"neighbourhood disjointness fails for {i}, {j}"
    log("disjointness", f"N[P*_i] misses N[P*_j] and B_j for all distinct i, j in X': passed")

    # terminals above the window and the anti-complete jump paths
    xs = {}
    upper: set[int] = set()
    for i in indep:
        xs[i] = next(x for x in paths[i] if lay.index(x) == z - 2)
        upper |= {x for x in paths[i] if lay.index(x) <= z - 2}
    terms = {xs[i]: i for i in indep}
    sub, mapping = induced_subgraph(g, upper)
    back = {t: v for v, t in mapping.items()}
    log("terminals", f"A = {sorted(terms)} in layer {z - 2}; upper graph has {sub.n} vertices")
    for i in indep:
        assert sub.degree(mapping[xs[i]]) == 1, f"terminal of block {i} has degree != 1 above the window"
    try:
        ps, atrace = anti_complete_apaths(sub, [mapping[x] for x in terms], d, budget=budget)
    except APathsFailure as exc:
        raise NoJumpPaths(f"no {d} anti-complete A-paths above the window:\n" + "\n".join(exc.trace)) from exc
    except UsageError as exc:
        raise NoJumpPaths(f"A-path search rejected the upper graph: {exc}") from exc
    jpaths = [tuple(back[v] for v in p) for p in ps.paths]
    for line in atrace:
        log("jump-paths", line)
    used = sorted(terms[p[0]] for p in jpaths) + sorted(terms[p[-1]] for p in jpaths)
    used = sorted(used)
    log("jump-paths", f"M = {[list(p) for p in jpaths]}; X = {used}")

    blob = {i: (block[i] | set(star[i])) - {xs[i]} for i in used}
    for j, p in enumerate(jpaths):
        np_ = _closed(g, p)
        for i in used:
            touches = bool(np_ & blob[i])
            assert touches == (xs[i] in (p[0], p[-1])), f"path {j} and block {i} meet wrongly"
    log("jump-paths", "N[M_j] meets the block of i iff x_i ends M_j: passed")

    # useless rows and columns
    blocked = set().union(*(nstar[i] for i in used)) if used else set()
    urows, ucols = audit_useless(lambda a, b: cell(a, b), q, blocked)
    tight_bound = 2 * d * c.delta * (ell + 2)
    sound_bound = 2 * d * (c.delta + 1) * (ell + 2)
    assert len(urows) <= sound_bound and len(ucols) <= sound_bound
    log("useless", f"{len(urows)} useless rows, {len(ucols)} useless columns; bound {sound_bound}"
        f" (closed neighbourhoods), tighter form {tight_bound}: "
        f"{'within' if max(len(urows), len(ucols)) <= tight_bound else 'exceeded'}")

    rows, cols = [], []
    for i in range(1, 2 * k3 + 1):
        lo, hi = (i - 1) * k1 + 1, i * k1 - 1
        r = next((x for x in range(lo, hi + 1) if x not in urows), None)
        cc = next((x for x in range(lo, hi + 1) if x not in ucols), None)
        if r is None or cc is None:
            raise PruningExhausted(f"interval {i} = [{lo}, {hi}] has no useful {'row' if r is None else 'column'}")
        rows.append(r)
        cols.append(cc)
    assert len(rows) == len(cols) == 2 * k3
    assert all(r not in urows for r in rows) and all(x not in ucols for x in cols)
    log("useful-indices", f"R = {rows}; C = {cols}; properties (i)-(iii): passed")

    # sub-model of a subdivided grid, blocks swapped for blobs, jump paths added
    sub_cells = {(a, b) for a in cols for b in range(rows[0], rows[-1] + 1)}
    sub_cells |= {(a, b) for a in range(cols[0], cols[-1] + 1) for b in rows}
    replaced = {ab for i in used for ab in cells_of[i]}
    branch_sets: list[frozenset[int]] = []
    node_of: dict[int, tuple[int, int]] = {}
    col_pos = {a: s for s, a in enumerate(cols, 1)}
    row_pos = {b: t for t, b in enumerate(rows, 1)}
    for a, b in sorted(sub_cells - replaced):
        if a in col_pos and b in row_pos:
            node_of[len(branch_sets)] = (col_pos[a], row_pos[b])
        branch_sets.append(cell(a, b))
    for i in used:
        node_of[len(branch_sets)] = (i, k3)
        branch_sets.append(frozenset(blob[i]))
    for p in jpaths:
        branch_sets.append(frozenset(p))
    log("assembly", f"{len(branch_sets)} branch sets: {len(node_of)} grid nodes, {len(used)} blobs, {len(jpaths)} jump paths")

    model, spec = _reconstruct(g, branch_sets, node_of, 2 * k3, k3)
    log("pattern", f"underlying graph is the {spec.d}-jump ({spec.k} x {spec.k})-grid, jump row {spec.b}, jumps {list(spec.jumps)}; "
        f"subdivision proper with {model.pattern.n - spec.k ** 2} subdivision vertices")
    verdict = verify_model(model)
    assert verdict.ok, verdict.describe()
    log("verify", "induced minor model verified")
    return Extraction(model, spec, trace, evens, indep, used, jpaths, rows, cols)


def _reconstruct(g: Graph, sets: list[frozenset[int]], node_of: dict[int, tuple[int, int]], k: int, b: int):
    """Read the pattern off the branch sets: contract them, then follow degree-2 chains between nodes."""
    label = {}
    for idx, s in enumerate(sets):
        for x in s:
            assert x not in label, "branch sets overlap"
            label[x] = idx
    quot: dict[int, set[int]] = {i: set() for i in range(len(sets))}
    for x, y in g.edges:
        a, bb = label.get(x), label.get(y)
        if a is not None and bb is not None and a != bb:
            quot[a].add(bb)
            quot[bb].add(a)
    chains: dict[tuple[int, int], list[int]] = {}
    seen_internal: set[int] = set()
    for start in node_of:
        for nb in sorted(quot[start]):
            prev, cur, walk = start, nb, []
            while cur not in node_of:
                assert len(quot[cur]) == 2, f"branch set {cur} is not on a chain"
                walk.append(cur)
                prev, cur = cur, next(w for w in quot[cur] if w != prev)
            u, v = node_of[start], node_of[cur]
            key = (grid_id(k, *u), grid_id(k, *v))
            if key[0] < key[1]:
                assert key not in chains, "parallel chains between two nodes"
                chains[key] = walk
            seen_internal |= set(walk)
    assert seen_internal | set(node_of) == set(range(len(sets))), "stray branch sets"
    jumps = []
    for (p, q_) in chains:
        (a1, b1), (a2, b2) = divmod(p, k)[::-1], divmod(q_, k)[::-1]
        if b1 == b2 and abs(a1 - a2) > 1:
            assert b1 + 1 == b, "jump outside the jump row"
            jumps.append((a1 + 1, a2 + 1))
    spec = JumpSpec(k, b, tuple(jumps))
    spec.validate()
    base = jump_grid(spec)
    assert set(chains) == set(base.edges), "contracted model is not the jump grid"
    assert all(len(w) >= 1 for w in chains.values()), "subdivision not proper"
    pattern = subdivide(base, {e: len(w) for e, w in chains.items()})
    smap = pattern.labels["subdivision"].as_dict()
    branch = {}
    for idx, (a, bb) in node_of.items():
        branch[grid_id(k, a, bb)] = sets[idx]
    for e, walk in chains.items():
        for pv, idx in zip(smap[e], walk):
            branch[pv] = sets[idx]
    return MinorModel(pattern, g, branch, "induced"), spec
