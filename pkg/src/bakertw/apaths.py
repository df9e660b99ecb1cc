"""A-paths: Gallai's dichotomy, an exhaustive induced Menger search, and anti-complete A-paths."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Mapping

import networkx as nx

from .errors import BudgetExhausted, UsageError
from .graph import Graph, bfs_path, components, is_connected
from .verdict import Verdict

MODES = ("vertex_disjoint", "anti_complete")


@dataclass
class PathSystem:
    host: Graph
    paths: tuple[tuple[int, ...], ...]
    terminals: frozenset[int]
    mode: str = "vertex_disjoint"

    def __post_init__(self):
        if self.mode not in MODES:
            raise UsageError(f"unknown mode {self.mode!r}")
        self.paths = tuple(tuple(int(x) for x in p) for p in self.paths)
        self.terminals = frozenset(self.terminals)

    def truncated(self, d: int) -> "PathSystem":
        return PathSystem(self.host, self.paths[:d], self.terminals, self.mode)


def _check_path(g: Graph, p: tuple[int, ...]) -> str | None:
    if len(set(p)) != len(p):
        return "repeated-vertex"
    for a, b in zip(p, p[1:]):
        if not g.has_edge(a, b):
            return "non-edge"
    return None


def verify_paths(ps: PathSystem) -> Verdict:
    g = ps.host
    verdict = Verdict()
    for p in ps.paths:
        g.check_vertices(p)
    for i, p in enumerate(ps.paths):
        if len(p) < 2:
            verdict.add("too-short", i)
            continue
        bad = _check_path(g, p)
        if bad:
            verdict.add(bad, i)
        if p[0] not in ps.terminals or p[-1] not in ps.terminals:
            verdict.add("end-not-terminal", i)
    sets = [frozenset(p) for p in ps.paths]
    for i, j in combinations(range(len(sets)), 2):
        if sets[i] & sets[j]:
            verdict.add("not-disjoint", (i, j))
        elif ps.mode == "anti_complete" and any(g.adj[v] & sets[j] for v in sets[i]):
            verdict.add("not-anti-complete", (i, j))
    return verdict


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _to_mask(vs: Iterable[int]) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


class _Counter:
    def __init__(self, budget: int | None, what: str):
        self.budget = budget
        self.nodes = 0
        self.what = what

    def tick(self):
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise BudgetExhausted(f"{self.what} exceeded {self.budget} nodes", self.nodes)


# ---------------------------------------------------------------------------
# Gallai
# ---------------------------------------------------------------------------

@dataclass
class GallaiResult:
    paths: PathSystem | None
    hitting_set: frozenset[int] | None

    @property
    def found(self) -> bool:
        return self.paths is not None


def _simple_paths(masks, start: int, alive: int, term: int, counter: _Counter):
    """Paths from ``start`` to another terminal whose internal vertices avoid terminals."""
    stack = [(start, 1 << start, (start,))]
    while stack:
        v, used, path = stack.pop()
        nxt = masks[v] & alive & ~used
        for w in sorted(_bits(nxt), reverse=True):
            counter.tick()
            if (term >> w) & 1:
                yield path + (w,)
            else:
                stack.append((w, used | (1 << w), path + (w,)))


def max_disjoint_apaths(g: Graph, a: Iterable[int], k: int, budget: int | None = None) -> list[tuple[int, ...]] | None:
    """``k`` vertex-disjoint A-paths by exhaustive search, or ``None`` if there are none."""
    a = frozenset(a)
    g.check_vertices(a)
    masks = g.neighbour_masks()
    term = _to_mask(a)
    counter = _Counter(budget, "A-path search")
    failed: set[tuple[int, int]] = set()

    def rec(alive: int, need: int) -> list[tuple[int, ...]] | None:
        if need == 0:
            return []
        live_terms = alive & term
        if live_terms.bit_count() < 2 * need or (alive, need) in failed:
            return None
        counter.tick()
        t = (live_terms & -live_terms).bit_length() - 1
        for p in _simple_paths(masks, t, alive, term, counter):
            rest = rec(alive & ~_to_mask(p), need - 1)
            if rest is not None:
                return [p] + rest
        rest = rec(alive & ~(1 << t), need)
        if rest is not None:
            return rest
        failed.add((alive, need))
        return None

    return rec((1 << g.n) - 1, k)


def has_apath(g: Graph, a: Iterable[int], removed: Iterable[int] = ()) -> bool:
    removed = set(removed)
    a = set(a) - removed
    keep = set(range(g.n)) - removed
    return any(len(set(c) & a) >= 2 for c in components(g, keep))


def gallai(g: Graph, a: Iterable[int], k: int, budget: int | None = None) -> GallaiResult:
    """Either ``k`` disjoint A-paths or a set of at most ``2k - 2`` vertices meeting every A-path."""
    if k < 1:
        raise UsageError("k must be positive")
    a = frozenset(a)
    paths = max_disjoint_apaths(g, a, k, budget)
    if paths is not None:
        ps = PathSystem(g, paths, a, "vertex_disjoint")
        verdict = verify_paths(ps)
        assert verdict.ok and len(paths) == k, verdict.describe()
        return GallaiResult(ps, None)
    for size in range(0, 2 * k - 1):
        for z in combinations(range(g.n), size):
            if not has_apath(g, a, z):
                return GallaiResult(None, frozenset(z))
    raise AssertionError("no hitting set of size 2k-2 although k disjoint A-paths do not exist")


def prop_threshold(k: int, delta: int) -> int:
    """Terminal count above which a connected graph of maximum degree ``delta`` has ``k`` disjoint A-paths."""
    return (2 * k - 2) * (delta + 1) + 1


def disjoint_apaths_bounded_degree(g: Graph, a: Iterable[int], k: int, budget: int | None = None) -> PathSystem:
    a = frozenset(a)
    if not is_connected(g):
        raise UsageError("graph must be connected")
    need = prop_threshold(k, g.max_degree())
    if len(a) < need:
        raise UsageError(f"|A| = {len(a)} is below (2k-2)(D+1)+1 = {need}")
    res = gallai(g, a, k, budget)
    assert res.found, "bounded-degree threshold met but no disjoint A-paths found"
    return res.paths


# ---------------------------------------------------------------------------
# Induced Menger (exhaustive)
# ---------------------------------------------------------------------------

@dataclass
class MengerResult:
    paths: list[tuple[int, ...]] | None
    separator: frozenset[int] | None
    nodes: int = 0
    exhaustive: bool = True


def _induced_xy_paths(masks, start: int, alive: int, xmask: int, ymask: int, counter: _Counter):
    """Induced paths from ``start`` to a vertex of Y whose interior avoids X and Y, shortest first."""
    if (ymask >> start) & 1:
        yield (start,)
        return
    level = [((start,), 1 << start)]
    while level:
        nxt_level = []
        for path, used in level:
            last = path[-1]
            for w in _bits(masks[last] & alive & ~used):
                counter.tick()
                # w may only see the last vertex of the path
                if masks[w] & used & ~(1 << last):
                    continue
                if (ymask >> w) & 1:
                    yield path + (w,)
                elif not (xmask >> w) & 1:
                    nxt_level.append((path + (w,), used | (1 << w)))
        level = nxt_level


def min_vertex_separator(g: Graph, x: Iterable[int], y: Iterable[int]) -> frozenset[int]:
    """Smallest vertex set whose removal leaves no (X, Y)-path (vertices of X and Y may be taken)."""
    x, y = set(x), set(y)
    d = nx.DiGraph()
    for v in range(g.n):
        d.add_edge(("in", v), ("out", v), capacity=1)
    for u, v in g.edges:
        d.add_edge(("out", u), ("in", v))
        d.add_edge(("out", v), ("in", u))
    for v in x:
        d.add_edge("s", ("in", v))
    for v in y:
        d.add_edge(("out", v), "t")
    _, (reach, _) = nx.minimum_cut(d, "s", "t")
    z = frozenset(v for v in range(g.n) if ("in", v) in reach and ("out", v) not in reach)
    keep = set(range(g.n)) - z
    assert bfs_path(g, x - z, y - z, keep) is None
    return z


def induced_menger(g: Graph, x: Iterable[int], y: Iterable[int], k: int, budget: int | None = None,
                   within: Iterable[int] | None = None) -> MengerResult:
    """``k`` pairwise anti-complete (X, Y)-paths, or a minimum (X, Y)-separator.

    Paths are searched exhaustively (branch on the lowest live vertex of X:
    either it is not used, or it starts one of the induced paths, whose closed
    neighbourhood is then removed). When no ``k`` paths exist, or the budget
    runs out first, a minimum vertex separator is returned; ``exhaustive``
    records which.
    """
    if k < 1:
        raise UsageError("k must be positive")
    x, y = frozenset(x), frozenset(y)
    if not x or not y:
        raise UsageError("X and Y must be nonempty")
    g.check_vertices(x | y)
    region = set(range(g.n)) if within is None else set(within)
    masks = g.neighbour_masks()
    xmask, ymask = _to_mask(x & region), _to_mask(y & region)
    counter = _Counter(budget, "induced Menger search")
    failed: set[tuple[int, int]] = set()

    def rec(alive: int, need: int):
        if need == 0:
            return []
        live_x = alive & xmask
        if not live_x or not alive & ymask or (alive, need) in failed:
            return None
        counter.tick()
        s = (live_x & -live_x).bit_length() - 1
        for p in _induced_xy_paths(masks, s, alive, xmask, ymask, counter):
            closed = _to_mask(p)
            for v in p:
                closed |= masks[v]
            rest = rec(alive & ~closed, need - 1)
            if rest is not None:
                return [p] + rest
        rest = rec(alive & ~(1 << s), need)
        if rest is not None:
            return rest
        failed.add((alive, need))
        return None

    exhaustive = True
    try:
        found = rec(_to_mask(region), k)
    except BudgetExhausted:
        found, exhaustive = None, False
    if found is not None:
        return MengerResult(found, None, counter.nodes, True)
    sub_sep = _separator_within(g, x & region, y & region, region)
    return MengerResult(None, sub_sep, counter.nodes, exhaustive)


def _separator_within(g: Graph, x, y, region) -> frozenset[int]:
    if len(region) == g.n:
        return min_vertex_separator(g, x, y)
    from .graph import induced_subgraph

    sub, mapping = induced_subgraph(g, region)
    back = {i: v for v, i in mapping.items()}
    z = min_vertex_separator(sub, {mapping[v] for v in x}, {mapping[v] for v in y})
    return frozenset(back[i] for i in z)


# ---------------------------------------------------------------------------
# Anti-complete A-paths
# ---------------------------------------------------------------------------

FM = int | Mapping[int, int] | Callable[[int, int], int]


def _fm_value(fm: FM, d: int, delta: int) -> int:
    if callable(fm):
        return int(fm(d, delta))
    if isinstance(fm, Mapping):
        return int(fm[d])
    return int(fm)


def f_a(d: int, delta: int, fm: FM = 1) -> int:
    """Terminal threshold of the anti-complete A-path recursion for separator bound ``fm``."""
    if d < 1:
        raise UsageError("d must be positive")
    val = 2
    for i in range(2, d + 1):
        val = (val + 2) * (delta + 1) * _fm_value(fm, i, delta)
    return val


class APathsFailure(RuntimeError):
    def __init__(self, msg: str, trace: list[str]):
        super().__init__(msg + "\n" + "\n".join(trace))
        self.trace = trace


@dataclass
class _State:
    budget: int | None
    max_attempts: int
    trace: list[str] = field(default_factory=list)
    separators: list[int] = field(default_factory=list)


def _bfs_order(g: Graph, region: set[int], terms: list[int], start: int) -> list[int]:
    dist = {start: 0}
    queue = [start]
    for u in queue:
        for w in sorted(g.adj[u]):
            if w in region and w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return sorted(terms, key=lambda v: (dist.get(v, g.n), v))


def _one_apath(g: Graph, region: set[int], terms: set[int]) -> tuple[int, ...] | None:
    best = None
    for t in sorted(terms):
        p = bfs_path(g, [t], terms - {t}, region)
        if p is not None and (best is None or len(p) < len(best)):
            best = tuple(p)
    return best


def _partitions(g: Graph, region: set[int], terms: list[int], d: int, delta: int, fm: FM, limit: int):
    """Candidate (X, Y) splits: |Y| : |X| near 2 : f_a(d-1), then rebalanced sizes, over several orderings."""
    n = len(terms)
    prev = f_a(d - 1, delta, fm)
    want_y = max(2, round(n * 2 / (prev + 2)))
    sizes = [want_y] + sorted({m for m in range(2, n - 1)} - {want_y}, key=lambda m: (abs(m - want_y), m))
    starts = terms[: max(1, limit // max(len(sizes), 1) + 1)]
    seen = set()
    count = 0

    def emit(order, y):
        key = frozenset(y)
        if key in seen or len(y) < 2 or n - len(y) < 1:
            return False
        seen.add(key)
        return True

    for m in sizes:
        for s in starts:
            order = _bfs_order(g, region, terms, s)
            # contiguous blocks of the BFS order, then every other terminal
            for y in (order[:m], order[-m:], order[::2][:m], order[1::2][:m]):
                if emit(order, y):
                    yield [v for v in order if v not in set(y)], sorted(y)
                    count += 1
                    if count >= limit:
                        return
    if n <= 8:
        for m in sizes:
            for y in combinations(terms, m):
                if emit(terms, y):
                    yield [v for v in terms if v not in set(y)], sorted(y)
                    count += 1
                    if count >= limit:
                        return


def _recurse(g: Graph, region: set[int], terms: set[int], d: int, delta: int, fm: FM, st: _State, depth: int):
    pad = "  " * depth
    if d == 0:
        return []
    if len(terms) < 2:
        st.trace.append(f"{pad}d={d}: only {len(terms)} terminals in a component of {len(region)} vertices")
        return None
    if d == 1:
        p = _one_apath(g, region, terms)
        st.trace.append(f"{pad}d=1: {'path ' + str(list(p)) if p else 'no A-path'}")
        return [p] if p else None
    ordered = sorted(terms)
    for attempt, (x, y) in enumerate(_partitions(g, region, ordered, d, delta, fm, st.max_attempts)):
        res = induced_menger(g, x, y, d, st.budget, within=region)
        if res.paths is not None:
            st.trace.append(f"{pad}d={d} attempt {attempt}: |X|={len(x)} |Y|={len(y)} -> {d} anti-complete paths")
            return [tuple(p) for p in res.paths]
        z = res.separator
        st.separators.append(len(z))
        comps = components(g, region - z)
        xs, ys = set(x), set(y)
        # no component meets both X and Y; the recursion takes d-1 paths in a
        # terminal-rich component and one path in another
        rich = sorted((c for c in comps if len(terms & set(c)) >= 2),
                      key=lambda c: (-len(xs & set(c)), -len(terms & set(c)), c[0]))
        st.trace.append(f"{pad}d={d} attempt {attempt}: |X|={len(x)} |Y|={len(y)} separator |Z|={len(z)}"
                        f" ({'exhaustive' if res.exhaustive else 'budget'}); "
                        f"components with 2+ terminals: {[len(terms & set(c)) for c in rich]}")
        if len(rich) < 2:
            continue
        for big in rich[:3]:
            inner = _recurse(g, set(big), terms & set(big), d - 1, delta, fm, st, depth + 1)
            if inner is None:
                continue
            for other in rich:
                if other is big:
                    continue
                p = _one_apath(g, set(other), terms & set(other))
                if p is not None:
                    return inner + [p]
    st.trace.append(f"{pad}d={d}: all partitions failed")
    return None


def anti_complete_apaths(g: Graph, a: Iterable[int], d: int, fm: FM = 1, budget: int | None = 200_000,
                         max_attempts: int = 24) -> tuple[PathSystem, list[str]]:
    """``d`` pairwise anti-complete A-paths following the separator recursion.

    Returns the verified path system and the recursion trace. The trace also
    records each separator size met, which is the measured stand-in for the
    separator bound ``fm``.
    """
    a = frozenset(a)
    if d < 1:
        raise UsageError("d must be positive")
    if not is_connected(g):
        raise UsageError("graph must be connected")
    g.check_vertices(a)
    st = _State(budget, max_attempts)
    delta = g.max_degree()
    st.trace.append(f"|A|={len(a)} d={d} D={delta} f_A(d)={f_a(d, delta, fm)} (fm={fm if not callable(fm) else 'callable'})")
    paths = _recurse(g, set(range(g.n)), set(a), d, delta, fm, st, 0)
    if paths is None:
        raise APathsFailure(f"could not find {d} anti-complete A-paths", st.trace)
    ps = PathSystem(g, paths, a, "anti_complete")
    verdict = verify_paths(ps)
    assert verdict.ok and len(paths) == d, verdict.describe()
    if st.separators:
        st.trace.append(f"separator sizes met: {st.separators}")
    return ps, st.trace
