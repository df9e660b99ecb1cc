"""Control partitions (asymptotic-dimension witnesses), band composition and clustered colourings."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import _kernels
from .errors import BudgetExhausted, UsageError
from .graph import INF, Graph, Layering, components, forest_layering, induced_subgraph, is_layering
from .verdict import Verdict


def weak_diameter(g: Graph, x: Iterable[int]) -> float:
    """Largest distance in ``g`` (not in ``g[x]``) between two vertices of ``x``."""
    xs = sorted(set(x))
    if not xs:
        raise UsageError("x must be nonempty")
    g.check_vertices(xs)
    best = 0
    for v in xs:
        dist = g.bfs([v])[xs]
        if (dist < 0).any():
            return INF
        best = max(best, int(dist.max()))
    return best


@dataclass
class ControlPartition:
    classes: list[list[frozenset[int]]]
    delta: int
    D: float
    covers: bool = True

    def __post_init__(self):
        # canonical order inside each class, so equal partitions compare equal
        self.classes = [sorted((frozenset(s) for s in cls), key=sorted) for cls in self.classes]

    @property
    def k(self) -> int:
        return len(self.classes)

    def sets(self) -> list[tuple[int, frozenset[int]]]:
        return [(c, s) for c, cls in enumerate(self.classes) for s in cls]


def _labels(n: int, sets: list[frozenset[int]], verdict: Verdict | None = None) -> np.ndarray:
    labels = np.full(n, -1, dtype=np.int64)
    for i, s in enumerate(sets):
        for v in s:
            if labels[v] >= 0 and verdict is not None:
                verdict.add("overlap", (int(labels[v]), i, v))
            labels[v] = i
    return labels


def set_distances(g: Graph, sets: list[frozenset[int]]) -> tuple[np.ndarray, np.ndarray]:
    """Pairwise set distances and weak diameters of disjoint sets (``UNREACHABLE`` for infinity)."""
    labels = _labels(g.n, sets)
    dm = g.distance_matrix()
    return (_kernels.label_min_distances(dm, labels, len(sets)),
            _kernels.label_max_distances(dm, labels, len(sets)))


def verify_control(g: Graph, p: ControlPartition, within: Iterable[int] | None = None) -> Verdict:
    """Cover (of ``within`` or all of ``g``), per-class separation ``> delta`` and weak diameter ``<= D``."""
    verdict = Verdict()
    flat = p.sets()
    for _, s in flat:
        g.check_vertices(s)
    sets = [s for _, s in flat]
    for i, s in enumerate(sets):
        if not s:
            verdict.add("empty-set", i)
    labels = _labels(g.n, sets, verdict)
    target = set(range(g.n)) if within is None else set(within)
    if p.covers:
        missing = sorted(v for v in target if labels[v] < 0)
        if missing:
            verdict.add("cover", missing[:10])
    if not sets:
        return verdict
    dmin, dmax = set_distances(g, sets)
    cls = [c for c, _ in flat]
    for i, j in itertools.combinations(range(len(sets)), 2):
        if cls[i] == cls[j] and dmin[i, j] <= p.delta:
            verdict.add("separation", (cls[i], i, j, int(dmin[i, j])))
    for i in range(len(sets)):
        w = INF if dmax[i] >= _kernels.UNREACHABLE else int(dmax[i])
        if sets[i] and w > p.D:
            verdict.add("diameter", (i, w))
    return verdict


def _measured_D(g: Graph, classes: list[list[frozenset[int]]]) -> float:
    sets = [s for cls in classes for s in cls if s]
    if not sets:
        return 0
    _, dmax = set_distances(g, sets)
    top = int(dmax.max())
    return INF if top >= _kernels.UNREACHABLE else top


# ---------------------------------------------------------------------------
# Base partitioners
# ---------------------------------------------------------------------------

class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        self.parent[max(a, b)] = min(a, b)
        return True


def _merge_close(g: Graph, pieces: list[frozenset[int]], cls: list[int], delta: int):
    """Merge same-class pieces at distance <= delta until none are left (distances in ``g``)."""
    while True:
        if len(pieces) <= 1:
            return pieces, cls
        dmin, _ = set_distances(g, pieces)
        uf = _UnionFind(len(pieces))
        changed = False
        for i, j in itertools.combinations(range(len(pieces)), 2):
            if cls[i] == cls[j] and dmin[i, j] <= delta:
                changed |= uf.union(i, j)
        if not changed:
            return pieces, cls
        groups: dict[int, set[int]] = {}
        for i, s in enumerate(pieces):
            groups.setdefault(uf.find(i), set()).update(s)
        keys = sorted(groups)
        pieces = [frozenset(groups[r]) for r in keys]
        cls = [cls[r] for r in keys]


def base_partition_bounded_tw(g: Graph, delta: int, within: Iterable[int] | None = None) -> ControlPartition:
    """Two-class partition from BFS intervals of width ``delta + 2``.

    Each component of ``g[within]`` is layered from its lowest vertex; the
    vertices in interval ``t`` get class ``t mod 2`` and split into
    components. Same-class pieces that end up within ``delta`` of each other
    (in ``g``) are merged. The result is verified before it is returned.
    """
    if delta < 0:
        raise UsageError("delta must be nonnegative")
    region = set(range(g.n)) if within is None else set(within)
    sub, mapping = induced_subgraph(g, region)
    back = {i: v for v, i in mapping.items()}
    pieces, cls = [], []
    if sub.n:
        lay = forest_layering(sub)
        width = delta + 2
        for t in range(0, len(lay), width):
            verts = set().union(*lay.layers[t:t + width])
            for comp in components(sub, verts):
                pieces.append(frozenset(back[v] for v in comp))
                cls.append((t // width) % 2)
    pieces, cls = _merge_close(g, pieces, cls, delta)
    classes: list[list[frozenset[int]]] = [[], []]
    for s, c in zip(pieces, cls):
        classes[c].append(s)
    part = ControlPartition(classes, delta, _measured_D(g, classes))
    verdict = verify_control(g, part, region)
    assert verdict.ok, verdict.describe()
    return part


def base_whole_component(g: Graph, delta: int, within: Iterable[int] | None = None) -> ControlPartition:
    """One class; each component of ``g[within]`` is a single set (merged if closer than ``delta``)."""
    region = set(range(g.n)) if within is None else set(within)
    pieces = [frozenset(c) for c in components(g, region)]
    pieces, cls = _merge_close(g, pieces, [0] * len(pieces), delta)
    part = ControlPartition([pieces], delta, _measured_D(g, [pieces]))
    verdict = verify_control(g, part, region)
    assert verdict.ok, verdict.describe()
    return part


BASES: dict[str, Callable] = {"bounded-tw": base_partition_bounded_tw, "whole": base_whole_component}


# ---------------------------------------------------------------------------
# Band composition
# ---------------------------------------------------------------------------

def band_span(delta: int) -> int:
    return 2 * (delta + 1)


def band_compose(g: Graph, lay: Layering, delta: int, base: Callable = base_partition_bounded_tw) -> ControlPartition:
    """Lift a partitioner for bounded-span pieces to the whole graph with one extra class.

    Layers are cut into bands of ``2(delta+1)`` consecutive layers; bands of
    equal parity are more than ``delta`` apart. The base partitioner runs on
    each component of each band. Pieces are then coloured with ``base + 1``
    classes, starting from class ``c`` in even bands and ``c + 1`` in odd
    bands, so that same-coloured pieces are more than ``delta`` apart.
    Pieces that cannot be coloured are merged with a conflicting neighbour
    and colouring restarts.
    """
    if not is_layering(g, lay):
        raise UsageError("not a layering of the graph")
    if delta < 1:
        raise UsageError("delta must be positive")
    s = band_span(delta)
    pieces: list[frozenset[int]] = []
    seed: list[int] = []
    base_k = None
    for j, start in enumerate(range(0, len(lay), s)):
        band = set().union(*lay.layers[start:start + s])
        for comp in components(g, band):
            try:
                part = base(g, delta, within=comp)
            except Exception as exc:  # pragma: no cover - surfaced with the band id
                raise RuntimeError(f"base partitioner failed on band {j}") from exc
            base_k = part.k if base_k is None else max(base_k, part.k)
            for c, sets in enumerate(part.classes):
                for piece in sets:
                    pieces.append(piece)
                    seed.append(c + (j % 2))
    k = (base_k or 1) + 1
    colours = None
    while colours is None:
        colours = _dsatur(g, pieces, seed, k, delta)
        if isinstance(colours, int):
            i = colours
            dmin, _ = set_distances(g, pieces)
            j = min((x for x in range(len(pieces)) if x != i and dmin[i, x] <= delta),
                    key=lambda x: (int(dmin[i, x]), x))
            pieces[j] = pieces[j] | pieces[i]
            seed[j] = min(seed[j], seed[i])
            del pieces[i], seed[i]
            colours = None
    classes: list[list[frozenset[int]]] = [[] for _ in range(k)]
    for piece, c in zip(pieces, colours):
        classes[c].append(piece)
    part = ControlPartition(classes, delta, _measured_D(g, classes))
    verdict = verify_control(g, part, lay.domain)
    assert verdict.ok, verdict.describe()
    return part


def _dsatur(g: Graph, pieces, seed, k: int, delta: int):
    """Colour pieces so conflicting ones differ; returns colours, or the index of a stuck piece."""
    if not pieces:
        return []
    dmin, _ = set_distances(g, pieces)
    n = len(pieces)
    conflict = [[j for j in range(n) if j != i and dmin[i, j] <= delta] for i in range(n)]
    colour = [-1] * n
    for _ in range(n):
        i = max((x for x in range(n) if colour[x] < 0),
                key=lambda x: (len({colour[y] for y in conflict[x] if colour[y] >= 0}), len(conflict[x]), -x))
        taken = {colour[y] for y in conflict[i] if colour[y] >= 0}
        prefs = [seed[i] % k] + [c for c in range(k) if c != seed[i] % k]
        free = [c for c in prefs if c not in taken]
        if not free:
            return i
        colour[i] = free[0]
    return colour


# ---------------------------------------------------------------------------
# Measured control functions
# ---------------------------------------------------------------------------

EXHAUSTIVE_LIMIT = 12


def _best_exhaustive(g: Graph, delta: int, k: int) -> float:
    """Smallest D over all assignments of ``k`` classes (sets = delta-components inside each class)."""
    if g.n == 0:
        return 0
    dm = g.distance_matrix().astype(np.int64)
    dm[dm < 0] = _kernels.UNREACHABLE
    close = dm <= delta
    best = INF
    for rest in itertools.product(range(k), repeat=g.n - 1):
        col = (0,) + rest
        worst = 0
        for c in range(k):
            members = [v for v in range(g.n) if col[v] == c]
            seen: set[int] = set()
            for v in members:
                if v in seen:
                    continue
                comp, stack = [v], [v]
                seen.add(v)
                while stack:
                    u = stack.pop()
                    for w in members:
                        if w not in seen and close[u, w]:
                            seen.add(w)
                            comp.append(w)
                            stack.append(w)
                worst = max(worst, int(dm[np.ix_(comp, comp)].max()))
                if worst >= best:
                    break
            if worst >= best:
                break
        best = min(best, worst)
    return INF if best >= _kernels.UNREACHABLE else best


def measure_control(g: Graph, deltas: Iterable[int], k: int, lay: Layering | None = None,
                    exhaustive: bool = True) -> list[tuple[int, float]]:
    """Best weak-diameter bound found with at most ``k`` classes, per delta (monotone in delta)."""
    deltas = sorted(set(deltas))
    lay = forest_layering(g) if lay is None else lay
    raw = []
    for delta in deltas:
        found: list[float] = []
        for builder in _builders(k):
            try:
                part = builder(g, lay, delta)
            except (UsageError, BudgetExhausted):
                continue
            if part.k <= k and verify_control(g, part).ok:
                found.append(part.D)
        if exhaustive and g.n <= EXHAUSTIVE_LIMIT and k ** max(g.n - 1, 0) <= 200_000:
            found.append(_best_exhaustive(g, delta, k))
        raw.append(min(found) if found else INF)
    # a partition that works for a larger delta also works for a smaller one
    out = []
    running = INF
    for delta, val in reversed(list(zip(deltas, raw))):
        running = min(running, val)
        out.append((delta, running))
    return out[::-1]


def _builders(k: int):
    out = [lambda g, lay, d: base_whole_component(g, d)]
    if k >= 2:
        out.append(lambda g, lay, d: base_partition_bounded_tw(g, d))
        out.append(lambda g, lay, d: band_compose(g, lay, d, base_whole_component))
    if k >= 3:
        out.append(lambda g, lay, d: band_compose(g, lay, d, base_partition_bounded_tw))
    return out


# ---------------------------------------------------------------------------
# Clustered colouring
# ---------------------------------------------------------------------------

@dataclass
class ClusteredColouring:
    colour: list[int]
    k: int
    c: int


def mono_components(g: Graph, colour: list[int]) -> list[list[int]]:
    out = []
    for col in sorted(set(colour)):
        out += components(g, [v for v in range(g.n) if colour[v] == col])
    return out


def verify_clustered(g: Graph, col: ClusteredColouring) -> Verdict:
    verdict = Verdict()
    if len(col.colour) != g.n:
        raise UsageError("colouring length differs from vertex count")
    for v, x in enumerate(col.colour):
        if not (0 <= x < col.k):
            verdict.add("colour-range", (v, x))
    for comp in mono_components(g, col.colour):
        if len(comp) > col.c:
            verdict.add("cluster", comp)
    return verdict


CLUSTER_EXHAUSTIVE = 18


def clustered_search(g: Graph, k: int, c: int, budget: int | None = 1_000_000) -> ClusteredColouring | None:
    """Exhaustive for small graphs (``None`` proves absence); layer-mod-k seed plus repair otherwise."""
    if k < 1 or c < 1:
        raise UsageError("k and c must be positive")
    if g.n <= CLUSTER_EXHAUSTIVE:
        res = _cluster_exhaustive(g, k, c, budget)
    else:
        res = _cluster_heuristic(g, k, c, budget)
    if res is not None:
        verdict = verify_clustered(g, res)
        assert verdict.ok, verdict.describe()
    return res


def _cluster_exhaustive(g: Graph, k: int, c: int, budget: int | None):
    lay = forest_layering(g)
    order = [v for layer in lay.layers for v in sorted(layer)]
    colour = [-1] * g.n
    nodes = 0

    def comp_size(v: int) -> int:
        seen, stack = {v}, [v]
        while stack:
            u = stack.pop()
            for w in g.adj[u]:
                if w not in seen and colour[w] == colour[v]:
                    seen.add(w)
                    stack.append(w)
                    if len(seen) > c:
                        return len(seen)
        return len(seen)

    def rec(i: int) -> bool:
        nonlocal nodes
        if i == len(order):
            return True
        v = order[i]
        # colours beyond the first unused one are symmetric
        top = min(k, max(colour, default=-1) + 2)
        for x in range(top):
            nodes += 1
            if budget is not None and nodes > budget:
                raise BudgetExhausted(f"clustered search exceeded {budget} nodes", nodes)
            colour[v] = x
            if comp_size(v) <= c and rec(i + 1):
                return True
            colour[v] = -1
        return False

    if rec(0):
        return ClusteredColouring(list(colour), k, c)
    return None


def _cluster_heuristic(g: Graph, k: int, c: int, budget: int | None):
    lay = forest_layering(g)
    colour = [lay.index(v) % k for v in range(g.n)]
    steps = 0
    while True:
        bad = [comp for comp in mono_components(g, colour) if len(comp) > c]
        if not bad:
            return ClusteredColouring(colour, k, c)
        steps += 1
        if budget is not None and steps > budget:
            raise BudgetExhausted("clustered repair did not converge", steps)
        comp = bad[0]
        # recolour the vertex of the oversized cluster that ends in the smallest cluster
        best = None
        for v in comp:
            old = colour[v]
            for x in range(k):
                if x == old:
                    continue
                colour[v] = x
                size = max(len(cc) for cc in components(g, [u for u in range(g.n) if colour[u] == x]) if v in cc)
                score = (size, v, x)
                if best is None or score < best:
                    best = score
            colour[v] = old
        _, v, x = best
        colour[v] = x
