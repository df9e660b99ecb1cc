"""Minor, induced-minor and fat-minor models: verification, search and transforms."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import _kernels
from .errors import BudgetExhausted, UsageError
from .families import JumpSpec, complete, grid_id, jump_grid
from .graph import Graph, components, induced_subgraph, is_connected
from .verdict import Verdict

FLAVOURS = ("plain", "induced")
DEFAULT_BUDGET = 2_000_000


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass
class MinorModel:
    pattern: Graph
    host: Graph
    branch: dict[int, frozenset[int]]
    flavour: str = "induced"

    def __post_init__(self):
        if self.flavour not in FLAVOURS:
            raise UsageError(f"unknown flavour {self.flavour!r}")
        self.branch = {int(v): frozenset(int(x) for x in s) for v, s in self.branch.items()}

    def support(self) -> frozenset[int]:
        return frozenset().union(*self.branch.values()) if self.branch else frozenset()


@dataclass
class FatMinorModel:
    pattern: Graph
    host: Graph
    r: int
    vertex_branch: dict[int, frozenset[int]]
    edge_branch: dict[tuple[int, int], frozenset[int]]
    origin: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.vertex_branch = {int(v): frozenset(s) for v, s in self.vertex_branch.items()}
        self.edge_branch = {_edge(*e): frozenset(s) for e, s in self.edge_branch.items()}


def _check_keys(pattern: Graph, host: Graph, branch: dict) -> None:
    if set(branch) != set(range(pattern.n)):
        raise UsageError("branch keys must be exactly the pattern vertices")
    for s in branch.values():
        host.check_vertices(s)


def verify_model(m: MinorModel) -> Verdict:
    host, pat = m.host, m.pattern
    _check_keys(pat, host, m.branch)
    verdict = Verdict()
    label = np.full(host.n, -1, dtype=np.int64)
    for v in range(pat.n):
        bs = m.branch[v]
        if not bs:
            verdict.add("empty-branch", v)
            continue
        for x in sorted(bs):
            if label[x] >= 0:
                verdict.add("disjointness", (int(label[x]), v, x))
            else:
                label[x] = v
        if not is_connected(host, bs):
            verdict.add("connectivity", v)
    touching = set()
    for x, y in host.edges:
        a, b = int(label[x]), int(label[y])
        if a >= 0 and b >= 0 and a != b:
            touching.add(_edge(a, b))
    for e in pat.edges:
        if e not in touching:
            verdict.add("adjacency", e)
    if m.flavour == "induced":
        for e in sorted(touching - set(pat.edges)):
            verdict.add("anti-completeness", e)
    return verdict


def verify_fat_model(m: FatMinorModel) -> Verdict:
    host, pat = m.host, m.pattern
    _check_keys(pat, host, m.vertex_branch)
    if set(m.edge_branch) != set(pat.edges):
        raise UsageError("edge_branch keys must be exactly the pattern edges")
    for s in m.edge_branch.values():
        host.check_vertices(s)
    if m.r < 0:
        raise UsageError("fatness radius must be nonnegative")
    verdict = Verdict()
    pieces: list[tuple[object, frozenset[int]]] = [(("v", v), m.vertex_branch[v]) for v in range(pat.n)]
    pieces += [(("e", e), m.edge_branch[e]) for e in pat.edges]
    for key, s in pieces:
        if not s:
            verdict.add("empty-piece", key)
        elif not is_connected(host, s):
            verdict.add("connectivity", key)
    for (u, v) in pat.edges:
        pe = m.edge_branch[(u, v)]
        for x in (u, v):
            if not (pe & m.vertex_branch[x]):
                verdict.add("F1", ((u, v), x))
    # F2: every pair not covered by F1 must be at distance >= r
    if m.r > 0:
        for i, (ka, sa) in enumerate(pieces):
            if not sa:
                continue
            dist = host.bfs(sorted(sa))
            for kb, sb in pieces[i + 1:]:
                if not sb or _incident(ka, kb):
                    continue
                d = min((int(dist[y]) for y in sb if dist[y] >= 0), default=None)
                if d is not None and d < m.r:
                    verdict.add("F2", (ka, kb, d))
    return verdict


def _incident(a, b) -> bool:
    if a[0] == b[0]:
        return False
    v, e = (a[1], b[1]) if a[0] == "v" else (b[1], a[1])
    return v in e


# ---------------------------------------------------------------------------
# Brute-force search
# ---------------------------------------------------------------------------

def connected_subsets(g: Graph, max_size: int, limit: int | None = None) -> list[int]:
    """All connected vertex subsets of size <= max_size as bitmasks, ordered by size then value."""
    masks = g.neighbour_masks()
    layer = {1 << v for v in range(g.n)}
    out = sorted(layer)
    for _ in range(max_size - 1):
        nxt = set()
        for s in layer:
            frontier = 0
            rest = s
            while rest:
                low = rest & -rest
                frontier |= masks[low.bit_length() - 1]
                rest ^= low
            frontier &= ~s
            while frontier:
                low = frontier & -frontier
                nxt.add(s | low)
                frontier ^= low
        if not nxt:
            break
        if limit is not None and len(out) + len(nxt) > limit:
            raise BudgetExhausted(f"more than {limit} connected subsets", len(out) + len(nxt))
        out += sorted(nxt)
        layer = nxt
    return out


def _search_order(pattern: Graph) -> list[int]:
    order: list[int] = []
    seen: set[int] = set()
    while len(order) < pattern.n:
        rest = [v for v in range(pattern.n) if v not in seen]
        start = max(rest, key=lambda v: (pattern.degree(v), -v))
        queue = [start]
        seen.add(start)
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in sorted(pattern.adj[v], key=lambda x: (-pattern.degree(x), x)):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return order


def _twins(pattern: Graph) -> list[tuple[int, int]]:
    out = []
    for u, v in combinations(range(pattern.n), 2):
        if pattern.adj[u] - {v} == pattern.adj[v] - {u}:
            out.append((u, v))
    return out


def _mask_to_set(mask: int) -> frozenset[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(out)


def _grow(masks, layer: set[int]) -> set[int]:
    nxt = set()
    for s in layer:
        frontier = 0
        rest = s
        while rest:
            low = rest & -rest
            frontier |= masks[low.bit_length() - 1]
            rest ^= low
        frontier &= ~s
        while frontier:
            low = frontier & -frontier
            nxt.add(s | low)
            frontier ^= low
    return nxt


def find_minor_model(host: Graph, pattern: Graph, induced: bool = True, budget: int | None = DEFAULT_BUDGET,
                     max_branch_size: int | None = None) -> MinorModel | None:
    """Exhaustive branch-set search with iterative deepening on branch-set size.

    Branch sets of size at most ``c`` are tried for ``c = 1, 2, ...`` up to
    ``max_branch_size`` (default: every connected subset that could occur).
    Returns a verified model, or ``None`` when the last level finished
    without one. ``None`` is a proof of absence only if that last level
    allowed every size; with a smaller cap an incomplete search raises
    ``BudgetExhausted`` instead. Twins of the pattern are assigned branch
    sets with increasing minimum vertex, which removes symmetric duplicates
    without losing models. The budget counts search nodes and enumerated
    subsets across all levels.
    """
    flavour = "induced" if induced else "plain"
    p, n = pattern.n, host.n
    if p == 0:
        return MinorModel(pattern, host, {}, flavour)
    if p > n:
        return None
    full = n - p + 1
    cap = full if max_branch_size is None else min(max_branch_size, full)
    masks = host.neighbour_masks()
    order = _search_order(pattern)
    pos = {v: i for i, v in enumerate(order)}
    earlier_twins: dict[int, list[int]] = {v: [] for v in order}
    for u, v in _twins(pattern):
        a, b = (u, v) if pos[u] < pos[v] else (v, u)
        earlier_twins[b].append(a)
    pnbrs = [pattern.adj[v] for v in range(p)]
    counter = [0]

    def spend(k: int = 1):
        counter[0] += k
        if budget is not None and counter[0] > budget:
            raise BudgetExhausted(f"minor search exceeded {budget} nodes", counter[0])

    layer = {1 << v for v in range(n)}
    subsets: list[int] = sorted(layer)
    spend(len(subsets))
    for size in range(1, cap + 1):
        if size > 1:
            layer = _grow(masks, layer)
            if not layer:
                # no connected sets this large: the previous level was already complete
                break
            spend(len(layer))
            subsets += sorted(layer)
        assigned = _search_level(host, pattern, induced, subsets, masks, order, earlier_twins, pnbrs, spend)
        if assigned is not None:
            model = MinorModel(pattern, host, {v: _mask_to_set(s) for v, s in assigned.items()}, flavour)
            verdict = verify_model(model)
            assert verdict.ok, verdict.describe()
            return model
    if cap < full and _grow(masks, layer):
        raise BudgetExhausted(f"no model with branch sets of size <= {cap}; search incomplete", counter[0])
    return None


def _search_level(host, pattern, induced, subsets, masks, order, earlier_twins, pnbrs, spend):
    p, n = pattern.n, host.n
    closed = []
    for s in subsets:
        nb = s
        rest = s
        while rest:
            low = rest & -rest
            nb |= masks[low.bit_length() - 1]
            rest ^= low
        closed.append(nb)
    lowest = [(s & -s).bit_length() - 1 for s in subsets]
    containing: list[list[int]] = [[] for _ in range(n)]
    for idx in range(len(subsets)):
        containing[lowest[idx]].append(idx)
    assigned: dict[int, int] = {}
    assigned_low: dict[int, int] = {}
    assigned_nb: dict[int, int] = {}
    by_member: dict[int, list[int]] = {}

    def touching(x: int) -> list[int]:
        if x not in by_member:
            bit = 1 << x
            by_member[x] = [i for i, s in enumerate(subsets) if s & bit]
        return by_member[x]

    def capacity_ok(used: int) -> bool:
        # each assigned branch set needs a distinct free neighbour per unassigned pattern neighbour
        for u, nb in assigned_nb.items():
            need = sum(1 for w in pnbrs[u] if w not in assigned)
            if need and (nb & ~used).bit_count() < need:
                return False
        return True

    def candidates(v: int, used: int):
        touch = [u for u in pnbrs[v] if u in assigned]
        if not touch:
            for x in range(n):
                if not (used >> x) & 1:
                    yield from containing[x]
            return
        # a candidate meets the open neighbourhood of the first touched branch;
        # list each once, under its lowest vertex inside that neighbourhood
        zone = assigned_nb[touch[0]] & ~used
        rest = zone
        while rest:
            low = rest & -rest
            rest ^= low
            for idx in touching(low.bit_length() - 1):
                hit = subsets[idx] & zone
                if hit & -hit == low:
                    yield idx

    def rec(i: int, used: int) -> bool:
        if i == p:
            return True
        if n - used.bit_count() < p - i:
            return False
        v = order[i]
        nbrs = [assigned[u] for u in pnbrs[v] if u in assigned]
        others = [assigned[u] for u in assigned if u not in pnbrs[v]] if induced else []
        floor = max((assigned_low[u] for u in earlier_twins[v]), default=-1)
        for idx in candidates(v, used):
            s = subsets[idx]
            if s & used or lowest[idx] <= floor:
                continue
            nb = closed[idx]
            if any(not (nb & b) for b in nbrs):
                continue
            if any(nb & b for b in others):
                continue
            spend()
            assigned[v] = s
            assigned_low[v] = lowest[idx]
            assigned_nb[v] = nb & ~s
            if capacity_ok(used | s) and rec(i + 1, used | s):
                return True
            del assigned[v]
            del assigned_low[v]
            del assigned_nb[v]
        return False

    return dict(assigned) if rec(0, 0) else None


def find_induced_minor(host: Graph, pattern: Graph, budget: int | None = DEFAULT_BUDGET,
                       max_branch_size: int | None = None) -> MinorModel | None:
    return find_minor_model(host, pattern, True, budget, max_branch_size)


def find_minor(host: Graph, pattern: Graph, budget: int | None = DEFAULT_BUDGET,
               max_branch_size: int | None = None) -> MinorModel | None:
    return find_minor_model(host, pattern, False, budget, max_branch_size)


def identity_model(g: Graph, flavour: str = "induced") -> MinorModel:
    return MinorModel(g, g, {v: frozenset([v]) for v in range(g.n)}, flavour)


def compose(outer: MinorModel, inner: MinorModel) -> MinorModel:
    """Model of ``outer.pattern`` in ``inner.host`` given ``outer.host == inner.pattern``."""
    if outer.host.n != inner.pattern.n or outer.host.edges != inner.pattern.edges:
        raise UsageError("outer host must be the inner pattern")
    flavour = "induced" if outer.flavour == inner.flavour == "induced" else "plain"
    branch = {v: frozenset().union(*(inner.branch[x] for x in s)) for v, s in outer.branch.items()}
    model = MinorModel(outer.pattern, inner.host, branch, flavour)
    verdict = verify_model(model)
    assert verdict.ok, verdict.describe()
    return model


# ---------------------------------------------------------------------------
# Fat minors
# ---------------------------------------------------------------------------

def _subdivision_of(pattern: Graph, h: Graph, r: int):
    sub = pattern.labels.get("subdivision")
    if sub is None or sub.base_n != h.n:
        raise UsageError("model pattern does not carry a subdivision map of H")
    if sorted(e for e, _ in sub.paths) != list(h.edges):
        raise UsageError("subdivision map edges differ from E(H)")
    if h.m and sub.uniform() != 3 * r:
        raise UsageError(f"pattern is not the {3 * r}-subdivision of H")
    return sub


def fat_from_induced(m: MinorModel, h: Graph, r: int) -> FatMinorModel:
    """Turn an induced model of ``H^(3r)`` into an ``r``-fat model of ``H``.

    The host is first restricted to the union of the branch sets. For each
    edge ``uv`` with subdivision vertices ``s1..s_3r`` (from ``u``), ``u``
    absorbs the branch sets of ``s1..s_r``, ``v`` those of ``s_2r+1..s_3r``,
    and the edge piece is made of the branch sets of ``s_r..s_2r+1`` so that
    it meets both enlarged vertex pieces. The returned host is the restricted
    induced subgraph; ``origin`` maps its vertices back to the input host.
    """
    if r < 1:
        raise UsageError("r must be at least 1")
    if m.flavour != "induced":
        raise UsageError("fat_from_induced needs an induced model")
    verdict = verify_model(m)
    if not verdict.ok:
        raise UsageError(f"input model does not verify: {verdict.describe()}")
    sub = _subdivision_of(m.pattern, h, r)
    host, mapping = induced_subgraph(m.host, m.support())
    branch = {x: frozenset(mapping[y] for y in s) for x, s in m.branch.items()}
    _assert_branch_distances(host, m.pattern, branch)
    vb = {v: set(branch[v]) for v in range(h.n)}
    eb = {}
    for (u, v), inner in sub.paths:
        for s in inner[:r]:
            vb[u] |= branch[s]
        for s in inner[2 * r:]:
            vb[v] |= branch[s]
        piece = set()
        for s in inner[r - 1:2 * r + 1]:
            piece |= branch[s]
        eb[(u, v)] = piece
    origin = {i: y for y, i in mapping.items()}
    fat = FatMinorModel(h, host, r, vb, eb, origin)
    verdict = verify_fat_model(fat)
    assert verdict.ok, verdict.describe()
    return fat


def _assert_branch_distances(host: Graph, pattern: Graph, branch: dict[int, frozenset[int]]) -> None:
    """Branch sets of an induced model in the restricted host are at least as far apart as their pattern vertices."""
    labels = np.full(host.n, -1, dtype=np.int64)
    for x, s in branch.items():
        labels[list(s)] = x
    got = _kernels.label_min_distances(host.distance_matrix(), labels, pattern.n)
    want = pattern.distance_matrix().astype(np.int64)
    want[want < 0] = _kernels.UNREACHABLE
    np.fill_diagonal(want, 0)
    np.fill_diagonal(got, 0)
    bad = np.argwhere(got < want)
    assert bad.size == 0, f"branch distance below pattern distance for pair {tuple(bad[0])}"


def minor_from_fat(fat: FatMinorModel) -> MinorModel:
    """A plain model from an ``r``-fat model with ``r >= 1``.

    For each pattern edge a shortest route through its edge piece joins the
    two vertex pieces; the route's interior is added to the lower endpoint.
    """
    if fat.r < 1:
        raise UsageError("need r >= 1")
    from .graph import bfs_path

    branch = {v: set(s) for v, s in fat.vertex_branch.items()}
    for (u, v), piece in sorted(fat.edge_branch.items()):
        route = bfs_path(fat.host, fat.vertex_branch[u] & piece, fat.vertex_branch[v], set(piece))
        if route is None:
            raise UsageError(f"edge piece of {(u, v)} does not join its ends")
        branch[u] |= set(route[:-1]) - fat.vertex_branch[v]
    model = MinorModel(fat.pattern, fat.host, branch, "plain")
    verdict = verify_model(model)
    assert verdict.ok, verdict.describe()
    return model


# ---------------------------------------------------------------------------
# Jump-grid routings
# ---------------------------------------------------------------------------

def jump_budget(t: int) -> int:
    """Jumps used by the routing below to build a K_t minor."""
    return (t - 3) * (t - 4) // 2 if t >= 4 else 0


def clique_routing(spec: JumpSpec, t: int) -> dict[int, frozenset[int]] | None:
    """Branch sets of K_t in the jump grid of ``spec``, or ``None``.

    Branch 0 is everything above the jump row plus the row vertices left
    unused, branch t-1 everything below it. Branches 1..t-2 are consecutive
    intervals of the jump row; consecutive intervals touch, and every other
    pair needs a jump with one end in each.
    """
    k, b = spec.k, spec.b
    if t <= 0:
        return {}
    if t == 1:
        return {0: frozenset([0])}
    if b < 2 or b > k - 1:
        return None
    m = t - 2
    row = [grid_id(k, a, b) for a in range(1, k + 1)]
    jumps = [tuple(sorted(j)) for j in spec.jumps]

    def owner(col: int, cuts: list[int]) -> int | None:
        for i in range(len(cuts) - 1):
            if cuts[i] <= col < cuts[i + 1]:
                return i
        return None

    def ok(cuts: list[int]) -> bool:
        need = {(i, j) for i in range(m) for j in range(i + 2, m)}
        for a, a2 in jumps:
            x, y = owner(a, cuts), owner(a2, cuts)
            if x is not None and y is not None:
                need.discard((min(x, y), max(x, y)))
        return not need

    # cuts c_0 < c_1 < ... < c_m; interval i covers columns [c_i, c_{i+1}); at least one column left over
    def rec(cuts: list[int]):
        if len(cuts) == m + 1:
            if cuts[-1] - cuts[0] < k and ok(cuts):
                return list(cuts)
            return None
        lo = cuts[-1] + 1 if cuts else 1
        for c in range(lo, k + 2):
            found = rec(cuts + [c])
            if found is not None:
                return found
        return None

    cuts = rec([]) if m > 0 else [1]
    if cuts is None:
        return None
    branch: dict[int, set[int]] = {i + 1: set(row[cuts[i] - 1:cuts[i + 1] - 1]) for i in range(m)}
    used = set().union(*branch.values()) if branch else set()
    top = {grid_id(k, a, bb) for a in range(1, k + 1) for bb in range(1, b)} | (set(row) - used)
    bottom = {grid_id(k, a, bb) for a in range(1, k + 1) for bb in range(b + 1, k + 1)}
    branch[0] = top
    branch[t - 1] = bottom
    return {i: frozenset(s) for i, s in branch.items()}


def clique_minor_in_jump_grid(j: Graph, t: int) -> MinorModel | None:
    spec = j.labels.get("jumpspec")
    if spec is None:
        raise UsageError("graph carries no jumpspec label")
    routing = clique_routing(spec, t)
    if routing is None:
        return None
    model = MinorModel(complete(t), j, routing, "plain")
    verdict = verify_model(model)
    assert verdict.ok, verdict.describe()
    return model


def induced_minor_via_subdivision(sub_j: Graph, h: Graph) -> MinorModel | None:
    """Induced model of ``h`` in a proper subdivision of a jump grid.

    Start from the K_t routing in the underlying jump grid. Each branch set
    keeps its original vertices and the subdivision vertices of edges inside
    it; for each edge of ``h`` the subdivision path of one jump-grid edge
    between the two branch sets is kept. Every other subdivision vertex is
    dropped, which removes the adjacencies ``h`` does not have.
    """
    sub = sub_j.labels.get("subdivision")
    spec = sub_j.labels.get("jumpspec")
    if sub is None or spec is None:
        raise UsageError("graph must carry subdivision and jumpspec labels")
    if not sub.is_proper:
        raise UsageError("subdivision is not proper")
    t = h.n
    if h.m == 0:
        if t > sub.base_n:
            return None
        model = MinorModel(h, sub_j, {i: frozenset([i]) for i in range(t)}, "induced")
    else:
        routing = clique_routing(spec, t)
        if routing is None:
            return None
        where = {x: i for i, s in routing.items() for x in s}
        paths = sub.as_dict()
        branch = {i: set(s) for i, s in routing.items()}
        chosen: dict[tuple[int, int], tuple[int, int]] = {}
        for (x, y), inner in sorted(paths.items()):
            a, b = where.get(x), where.get(y)
            if a is None or b is None:
                continue
            if a == b:
                branch[a] |= set(inner)
            else:
                chosen.setdefault(_edge(a, b), (x, y))
        for (a, b) in h.edges:
            x, y = chosen[(a, b)]
            branch[a] |= set(paths[(x, y)])
        model = MinorModel(h, sub_j, branch, "induced")
    verdict = verify_model(model)
    assert verdict.ok, verdict.describe()
    return model


def underlying_jump_grid(sub_j: Graph) -> Graph:
    """The jump grid that ``sub_j`` subdivides."""
    spec = sub_j.labels["jumpspec"]
    return jump_grid(spec)
