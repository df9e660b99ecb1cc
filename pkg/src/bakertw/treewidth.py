"""Tree decompositions: verification, exact and heuristic width, and DP solvers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BudgetExhausted, UsageError
from .graph import Graph, components, induced_subgraph
from .verdict import Verdict

PROBLEMS = ("max_independent_set", "min_vertex_cover", "min_dominating_set")
ALIASES = {"mis": "max_independent_set", "mvc": "min_vertex_cover", "mds": "min_dominating_set"}


def canonical_problem(problem: str) -> str:
    problem = ALIASES.get(problem, problem)
    if problem not in PROBLEMS:
        raise UsageError(f"unknown problem {problem!r}")
    return problem


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    tree_edges: tuple[tuple[int, int], ...] = ()

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    @property
    def tree(self) -> Graph:
        return Graph(len(self.bags), self.tree_edges)

    def neighbours(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.tree_edges:
            out[a].append(b)
            out[b].append(a)
        return out


@dataclass(frozen=True)
class WidthResult:
    """``width is None`` means the exact solver stopped at a cap: the width exceeds ``lower - 1``."""

    width: int | None
    decomposition: TreeDecomposition | None
    lower: int
    exact: bool


def _is_tree(td: TreeDecomposition) -> bool:
    t = len(td.bags)
    if t == 0 or len(td.tree_edges) != t - 1:
        return False
    for a, b in td.tree_edges:
        if not (0 <= a < t and 0 <= b < t) or a == b:
            return False
    return len(components(td.tree)) == 1


def verify_decomposition(g: Graph, td: TreeDecomposition) -> Verdict:
    if not _is_tree(td):
        raise UsageError("decomposition index graph is not a tree")
    verdict = Verdict()
    where: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for i, bag in enumerate(td.bags):
        for v in bag:
            if v not in where:
                verdict.add("unknown-vertex", (i, v))
            else:
                where[v].append(i)
    tree = td.tree
    for v, nodes in where.items():
        if not nodes:
            verdict.add("vertex-uncovered", v)
        elif len(components(tree, nodes)) != 1:
            verdict.add("vertex-subtree-disconnected", (v, tuple(nodes)))
    for u, v in g.edges:
        if not (set(where[u]) & set(where[v])):
            verdict.add("edge-uncovered", (u, v))
    recomputed = max((len(b) for b in td.bags), default=0) - 1
    if recomputed != td.width:
        verdict.add("width-mismatch", (td.width, recomputed))
    return verdict


# ---------------------------------------------------------------------------
# Elimination orderings
# ---------------------------------------------------------------------------

def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _adj_masks(g: Graph) -> dict[int, int]:
    return dict(enumerate(g.neighbour_masks()))


def _eliminate(adj: dict[int, int], v: int) -> dict[int, int]:
    nb = adj[v]
    out = dict(adj)
    del out[v]
    clear = ~(1 << v)
    for u in _bits(nb):
        out[u] = (out[u] | nb) & clear & ~(1 << u)
    return out


def _fill(adj: dict[int, int], v: int) -> int:
    nb = adj[v]
    missing = 0
    for u in _bits(nb):
        missing += (nb & ~adj[u] & ~(1 << u)).bit_count()
    return missing // 2


def decomposition_from_ordering(g: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Bag of ``v`` = ``v`` plus its later neighbours in the filled graph."""
    if sorted(order) != list(range(g.n)):
        raise UsageError("ordering must be a permutation of the vertices")
    if g.n == 0:
        return TreeDecomposition((frozenset(),), ())
    pos = {v: i for i, v in enumerate(order)}
    adj = _adj_masks(g)
    bags = []
    parents: list[int | None] = []
    for v in order:
        higher = list(_bits(adj[v]))
        bags.append(frozenset([v, *higher]))
        parents.append(pos[min(higher, key=pos.__getitem__)] if higher else None)
        adj = _eliminate(adj, v)
    edges = [(i, p) for i, p in enumerate(parents) if p is not None]
    roots = [i for i, p in enumerate(parents) if p is None]
    edges += list(zip(roots, roots[1:]))
    return TreeDecomposition(tuple(bags), tuple(edges))


def greedy_ordering(g: Graph, heuristic: str = "min-fill") -> list[int]:
    if heuristic not in ("min-fill", "min-degree"):
        raise UsageError(f"unknown heuristic {heuristic!r}")
    adj = _adj_masks(g)
    order = []
    while adj:
        if heuristic == "min-degree":
            v = min(adj, key=lambda x: (adj[x].bit_count(), x))
        else:
            v = min(adj, key=lambda x: (_fill(adj, x), adj[x].bit_count(), x))
        order.append(v)
        adj = _eliminate(adj, v)
    return order


def treewidth_upper(g: Graph, heuristic: str = "min-fill") -> WidthResult:
    td = decomposition_from_ordering(g, greedy_ordering(g, heuristic))
    return WidthResult(td.width, td, 0, False)


def _mmw(adj: dict[int, int]) -> int:
    adj = dict(adj)
    lb = 0
    while len(adj) > 1:
        v = min(adj, key=lambda x: (adj[x].bit_count(), x))
        d = adj[v].bit_count()
        lb = max(lb, d)
        if d == 0:
            del adj[v]
            continue
        u = min(_bits(adj[v]), key=lambda x: ((adj[x] & adj[v]).bit_count(), adj[x].bit_count(), x))
        merged = (adj[u] | adj[v]) & ~(1 << u) & ~(1 << v)
        del adj[v]
        adj[u] = merged
        for w in _bits(merged):
            adj[w] = (adj[w] & ~(1 << v)) | (1 << u)
    return lb


def minor_min_width(g: Graph) -> int:
    """Contraction-degeneracy lower bound on treewidth."""
    return _mmw(_adj_masks(g))


class _WidthDecider:
    """Depth-first search over elimination orderings for ``tw <= k``.

    The graph left after eliminating a set depends only on the set, so
    failures are memoised by the remaining-vertex mask. Simplicial and
    almost-simplicial vertices of degree at most ``k`` are eliminated
    without branching; both rules are safe for the decision problem.
    """

    def __init__(self, k: int, budget: int | None):
        self.k = k
        self.budget = budget
        self.nodes = 0
        self.failed: set[int] = set()

    def _safe_vertex(self, adj: dict[int, int]) -> int | None:
        for v in sorted(adj):
            nb = adj[v]
            if nb.bit_count() > self.k:
                continue
            bad = [(u, nb & ~adj[u] & ~(1 << u)) for u in _bits(nb) if nb & ~adj[u] & ~(1 << u)]
            if not bad:
                return v
            u0, miss0 = bad[0]
            cands = [u0] if miss0.bit_count() > 1 else [u0, miss0.bit_length() - 1]
            for w in cands:
                rest = nb & ~(1 << w)
                if all(not (rest & ~adj[u] & ~(1 << u)) for u in _bits(rest)):
                    return v
        return None

    def run(self, adj: dict[int, int]) -> list[int] | None:
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise BudgetExhausted(f"exact treewidth search exceeded {self.budget} nodes", self.nodes)
        prefix = []
        while len(adj) > self.k + 1:
            v = self._safe_vertex(adj)
            if v is None:
                break
            prefix.append(v)
            adj = _eliminate(adj, v)
        if len(adj) <= self.k + 1:
            return prefix + sorted(adj)
        key = sum(1 << v for v in adj)
        if key in self.failed:
            return None
        if _mmw(adj) > self.k:
            self.failed.add(key)
            return None
        cands = [v for v in adj if adj[v].bit_count() <= self.k]
        cands.sort(key=lambda x: (_fill(adj, x), adj[x].bit_count(), x))
        for v in cands:
            rest = self.run(_eliminate(adj, v))
            if rest is not None:
                return prefix + [v] + rest
        self.failed.add(key)
        return None


def _exact_connected(g: Graph, cap: int | None, budget: int | None) -> tuple[int | None, list[int] | None, int]:
    upper_order = greedy_ordering(g, "min-fill")
    ub = decomposition_from_ordering(g, upper_order).width
    lb = minor_min_width(g)
    nodes = 0
    for k in range(lb, ub):
        if cap is not None and k > cap:
            return None, None, k
        decider = _WidthDecider(k, None if budget is None else budget - nodes)
        order = decider.run(_adj_masks(g))
        nodes += decider.nodes
        if order is not None:
            return k, order, k
    if cap is not None and ub > cap:
        return None, None, ub
    return ub, upper_order, ub


def treewidth_exact(g: Graph, cap: int | None = None, budget: int | None = None) -> WidthResult:
    """Exact treewidth with a verified witness, or ``width=None`` once it provably exceeds ``cap``."""
    if g.n == 0:
        return WidthResult(-1, TreeDecomposition((frozenset(),), ()), -1, True)
    best = 0
    order: list[int] = []
    for comp in components(g):
        sub, mapping = induced_subgraph(g, comp)
        back = {i: v for v, i in mapping.items()}
        w, sub_order, low = _exact_connected(sub, cap, budget)
        if w is None:
            return WidthResult(None, None, cap + 1, True)
        best = max(best, w)
        order += [back[v] for v in sub_order]
    td = decomposition_from_ordering(g, order)
    assert td.width == best and verify_decomposition(g, td).ok
    return WidthResult(best, td, best, True)


# ---------------------------------------------------------------------------
# Nice decompositions and dynamic programming
# ---------------------------------------------------------------------------

LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


def nice_form(td: TreeDecomposition) -> list[tuple]:
    """Convert to a nice decomposition rooted at an empty bag.

    Nodes are ``(kind, bag, vertex, children)`` listed children-first; the
    last node is the root.
    """
    nodes: list[tuple] = []

    def add(kind, bag, v, children):
        nodes.append((kind, bag, v, tuple(children)))
        return len(nodes) - 1

    def chain(child: int, src: frozenset, dst: frozenset) -> int:
        bag = src
        for v in sorted(src - dst):
            bag = bag - {v}
            child = add(FORGET, bag, v, [child])
        for v in sorted(dst - src):
            bag = bag | {v}
            child = add(INTRODUCE, bag, v, [child])
        return child

    nbrs = td.neighbours()
    parent = {0: None}
    order = [0]
    for x in order:
        for y in sorted(nbrs[x]):
            if y not in parent:
                parent[y] = x
                order.append(y)
    top: dict[int, int] = {}
    for x in reversed(order):
        bag = td.bags[x]
        kids = [y for y in nbrs[x] if parent.get(y) == x]
        if not kids:
            top[x] = chain(add(LEAF, frozenset(), None, []), frozenset(), bag)
            continue
        heads = [chain(top[y], td.bags[y], bag) for y in sorted(kids)]
        cur = heads[0]
        for h in heads[1:]:
            cur = add(JOIN, bag, None, [cur, h])
        top[x] = cur
    chain(top[0], td.bags[0], frozenset())
    return nodes


def _better(problem: str, a: frozenset, b: frozenset | None) -> bool:
    if b is None:
        return True
    if problem == "max_independent_set":
        return len(a) > len(b)
    return len(a) < len(b)


def dp_solve(g: Graph, td: TreeDecomposition, problem: str, required: Iterable[int] | None = None) -> tuple[int, frozenset[int]]:
    """Exact optimum and witness by dynamic programming over ``td``.

    Bag states per vertex: MIS and MVC use 0/1 membership. Dominating set
    uses three states: 1 = in the set, 2 = outside but dominated, 0 =
    outside and not yet dominated. A vertex may only be forgotten in state 0
    when it is not in ``required`` (all vertices by default), which lets the
    shifting engine ask for domination of a core subset only.
    """
    problem = canonical_problem(problem)
    verdict = verify_decomposition(g, td)
    if not verdict.ok:
        raise UsageError(f"invalid tree decomposition: {verdict.describe()}")
    need = set(range(g.n)) if required is None else set(required)
    adj = g.adj
    tables: list[dict] = []
    for kind, bag, v, children in nice_form(td):
        order = tuple(sorted(bag))
        if kind == LEAF:
            table = {(): frozenset()}
        elif kind == INTRODUCE:
            child = tables[children[0]]
            corder = tuple(sorted(bag - {v}))
            pos = order.index(v)
            bnbr = [i for i, u in enumerate(corder) if u in adj[v]]
            table = {}
            for st, w in child.items():
                for s, nst, nw in _introduce(problem, st, w, v, bnbr, pos):
                    if _better(problem, nw, table.get(nst)):
                        table[nst] = nw
        elif kind == FORGET:
            child = tables[children[0]]
            corder = tuple(sorted(bag | {v}))
            pos = corder.index(v)
            table = {}
            for st, w in child.items():
                s = st[pos]
                if problem == "min_dominating_set" and s == 0 and v in need:
                    continue
                nst = st[:pos] + st[pos + 1:]
                if _better(problem, w, table.get(nst)):
                    table[nst] = w
        else:
            table = _join(problem, tables[children[0]], tables[children[1]])
        tables.append(table)
    root = tables[-1]
    if () not in root:
        raise UsageError("no feasible solution (a required vertex cannot be dominated)")
    w = root[()]
    return len(w), w


def _introduce(problem, st, w, v, bnbr, pos):
    if problem == "max_independent_set":
        yield 0, st[:pos] + (0,) + st[pos:], w
        if all(st[i] == 0 for i in bnbr):
            yield 1, st[:pos] + (1,) + st[pos:], w | {v}
    elif problem == "min_vertex_cover":
        yield 1, st[:pos] + (1,) + st[pos:], w | {v}
        if all(st[i] == 1 for i in bnbr):
            yield 0, st[:pos] + (0,) + st[pos:], w
    else:
        lst = list(st)
        for i in bnbr:
            if lst[i] == 0:
                lst[i] = 2
        yield 1, tuple(lst[:pos]) + (1,) + tuple(lst[pos:]), w | {v}
        s = 2 if any(st[i] == 1 for i in bnbr) else 0
        yield s, st[:pos] + (s,) + st[pos:], w


def _join(problem, left: dict, right: dict) -> dict:
    table: dict = {}
    if problem != "min_dominating_set":
        for st, w1 in left.items():
            w2 = right.get(st)
            if w2 is None:
                continue
            w = w1 | w2
            if _better(problem, w, table.get(st)):
                table[st] = w
        return table
    groups: dict[tuple, list] = {}
    for st, w2 in right.items():
        groups.setdefault(tuple(s == 1 for s in st), []).append((st, w2))
    for st1, w1 in left.items():
        for st2, w2 in groups.get(tuple(s == 1 for s in st1), ()):
            nst = tuple(1 if a == 1 else (2 if (a == 2 or b == 2) else 0) for a, b in zip(st1, st2))
            w = w1 | w2
            if _better(problem, w, table.get(nst)):
                table[nst] = w
    return table


# ---------------------------------------------------------------------------
# Feasibility checks shared with the shifting engine and the tests
# ---------------------------------------------------------------------------

def is_independent(g: Graph, s: Iterable[int]) -> bool:
    s = set(s)
    return all(not (g.adj[v] & s) for v in s)


def is_vertex_cover(g: Graph, s: Iterable[int]) -> bool:
    s = set(s)
    return all(u in s or v in s for u, v in g.edges)


def is_dominating(g: Graph, s: Iterable[int], targets: Iterable[int] | None = None) -> bool:
    s = set(s)
    targets = range(g.n) if targets is None else targets
    return all(v in s or g.adj[v] & s for v in targets)


def feasible(g: Graph, problem: str, s: Iterable[int]) -> bool:
    problem = canonical_problem(problem)
    if problem == "max_independent_set":
        return is_independent(g, s)
    if problem == "min_vertex_cover":
        return is_vertex_cover(g, s)
    return is_dominating(g, s)
