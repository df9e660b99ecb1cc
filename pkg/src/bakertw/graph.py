"""Finite simple graphs with dense integer vertex ids, layerings and metrics."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import UsageError

INF = math.inf


class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``.

    ``labels`` holds serialisable annotations (grid coordinates, jump specs,
    subdivision maps, apex ids). They ride along through I/O but are not part
    of the graph structure; two graphs compare equal when their vertex counts,
    edge sets and labels agree.
    """

    __slots__ = ("n", "edges", "adj", "labels", "_csr", "_dm", "_masks")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = (), labels: Mapping | None = None):
        if n < 0:
            raise UsageError(f"negative vertex count {n}")
        es = set()
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise UsageError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise UsageError(f"edge ({u}, {v}) out of range for n={n}")
            if u > v:
                u, v = v, u
            es.add((u, v))
            nbrs[u].add(v)
            nbrs[v].add(u)
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(es))
        self.adj: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in nbrs)
        self.labels: dict = dict(labels) if labels else {}
        self._csr = None
        self._dm = None
        self._masks = None

    # -- basic queries -----------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(self.n)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def neighbours(self, v: int) -> list[int]:
        return sorted(self.adj[v])

    def closed_neighbourhood(self, vs: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for v in vs:
            out.add(v)
            out |= self.adj[v]
        return out

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def check_vertices(self, vs: Iterable[int]) -> None:
        for v in vs:
            if not (isinstance(v, (int, np.integer)) and 0 <= v < self.n):
                raise UsageError(f"vertex {v!r} out of range for n={self.n}")

    def with_labels(self, **labels) -> "Graph":
        g = Graph(self.n, self.edges, {**self.labels, **labels})
        return g

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges and self.labels == other.labels

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    # -- cached array views ------------------------------------------------

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        if self._csr is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            for v in range(self.n):
                indptr[v + 1] = indptr[v] + len(self.adj[v])
            indices = np.empty(int(indptr[-1]), dtype=np.int64)
            for v in range(self.n):
                indices[indptr[v]:indptr[v + 1]] = sorted(self.adj[v])
            self._csr = (indptr, indices)
        return self._csr

    def distance_matrix(self) -> np.ndarray:
        """All-pairs BFS distances (``-1`` for unreachable pairs)."""
        if self._dm is None:
            indptr, indices = self.csr()
            self._dm = _kernels.distance_matrix(indptr, indices, self.n)
        return self._dm

    def bfs(self, sources: Iterable[int]) -> np.ndarray:
        indptr, indices = self.csr()
        src = np.fromiter(sources, dtype=np.int64)
        return _kernels.bfs_distances(indptr, indices, src, self.n)

    def neighbour_masks(self) -> list[int]:
        """Open neighbourhoods as Python int bitmasks."""
        if self._masks is None:
            masks = []
            for v in range(self.n):
                m = 0
                for w in self.adj[v]:
                    m |= 1 << w
                masks.append(m)
            self._masks = masks
        return self._masks


# ---------------------------------------------------------------------------
# Set-level metric utilities
# ---------------------------------------------------------------------------

def _nonempty(name: str, s) -> frozenset[int]:
    s = frozenset(s)
    if not s:
        raise UsageError(f"{name} must be nonempty")
    return s


def distance(g: Graph, x: Iterable[int], y: Iterable[int]) -> float:
    """Length of a shortest (x, y)-path, or ``inf`` if there is none."""
    x = _nonempty("x", x)
    y = _nonempty("y", y)
    g.check_vertices(x | y)
    if x & y:
        return 0
    dist = g.bfs(sorted(x))
    best = min(int(dist[v]) if dist[v] >= 0 else INF for v in y)
    return best


def components(g: Graph, within: Iterable[int] | None = None) -> list[list[int]]:
    """Connected components (of ``g[within]`` if given), each sorted, ordered by lowest vertex."""
    allowed = set(range(g.n)) if within is None else set(within)
    seen: set[int] = set()
    out = []
    for s in sorted(allowed):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.adj[u]:
                if w in allowed and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        out.append(sorted(comp))
    return out


def is_connected(g: Graph, within: Iterable[int] | None = None) -> bool:
    if within is not None:
        within = list(within)
        if not within:
            return False
    elif g.n == 0:
        return False
    return len(components(g, within)) == 1


def anti_complete(g: Graph, x: Iterable[int], y: Iterable[int]) -> bool:
    x = frozenset(x)
    y = frozenset(y)
    if x & y:
        return False
    return not any(g.adj[v] & y for v in x)


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Return ``g[s]`` with vertices renumbered in increasing order, plus the old-to-new map."""
    verts = sorted(set(s))
    g.check_vertices(verts)
    mapping = {v: i for i, v in enumerate(verts)}
    edges = [(mapping[u], mapping[v]) for u, v in g.edges if u in mapping and v in mapping]
    labels = {}
    coords = g.labels.get("coord")
    if coords:
        labels["coord"] = {mapping[v]: c for v, c in coords.items() if v in mapping}
    return Graph(len(verts), edges, labels), mapping


@dataclass(frozen=True)
class Metrics:
    max_degree: int
    girth: float
    radius: float
    components: int


def girth(g: Graph) -> float:
    if g.n == 0 or g.m == 0:
        return INF
    indptr, indices = g.csr()
    best = int(_kernels.girth(indptr, indices, g.n))
    return INF if best >= _kernels.UNREACHABLE else best


def radius(g: Graph) -> float:
    if g.n == 0:
        return 0
    dm = g.distance_matrix()
    if (dm < 0).any():
        return INF
    return int(dm.max(axis=1).min())


def metrics(g: Graph) -> Metrics:
    return Metrics(g.max_degree(), girth(g), radius(g), len(components(g)))


# ---------------------------------------------------------------------------
# Layerings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Layering:
    """Ordered partition ``(L0, L1, ...)`` of a vertex domain.

    ``domain`` is the vertex set being layered. It is ``V(G)`` except when a
    BFS layering of a disconnected graph was restricted to the root's
    component, in which case ``restricted`` is set.
    """

    layers: tuple[frozenset[int], ...]
    origin: str = "explicit"
    root: int | None = None
    restricted: bool = False
    _index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        idx = {}
        for i, layer in enumerate(self.layers):
            for v in layer:
                idx.setdefault(v, i)
        object.__setattr__(self, "_index", idx)

    @classmethod
    def explicit(cls, layers: Iterable[Iterable[int]]) -> "Layering":
        return cls(tuple(frozenset(layer) for layer in layers))

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(self._index)

    def __len__(self):
        return len(self.layers)

    def index(self, v: int) -> int:
        return self._index[v]

    def window(self, z: int, ell: int) -> set[int]:
        """Vertices in layers ``z .. z+ell-1``."""
        out: set[int] = set()
        for i in range(max(z, 0), min(z + ell, len(self.layers))):
            out |= self.layers[i]
        return out


def bfs_layering(g: Graph, r: int) -> Layering:
    """Layer ``i`` holds the vertices at distance ``i`` from ``r``.

    On a disconnected graph only the root's component is layered and the
    result is flagged ``restricted``.
    """
    g.check_vertices([r])
    dist = g.bfs([r])
    depth = int(dist.max())
    layers = [set() for _ in range(depth + 1)]
    for v in range(g.n):
        if dist[v] >= 0:
            layers[int(dist[v])].add(v)
    restricted = bool((dist < 0).any())
    return Layering(tuple(frozenset(s) for s in layers), "bfs", r, restricted)


def forest_layering(g: Graph, roots: Iterable[int] | None = None) -> Layering:
    """BFS layering of every component at once, each rooted at its lowest vertex (or the given roots).

    Layer ``i`` is the union over components of the vertices at distance
    ``i`` from that component's root. Edges stay inside components, so this
    is a layering of the whole graph.
    """
    if roots is None:
        roots = [c[0] for c in components(g)]
    roots = sorted(set(roots))
    g.check_vertices(roots)
    dist = g.bfs(roots)
    if (dist < 0).any():
        raise UsageError("roots do not reach every component")
    for c in components(g):
        if len(set(c) & set(roots)) != 1:
            raise UsageError("need exactly one root per component")
    depth = int(dist.max()) if g.n else -1
    layers = [set() for _ in range(depth + 1)]
    for v in range(g.n):
        layers[int(dist[v])].add(v)
    return Layering(tuple(frozenset(s) for s in layers), "bfs", roots[0] if len(roots) == 1 else None, False)


def is_layering(g: Graph, lay: Layering) -> bool:
    seen: set[int] = set()
    for layer in lay.layers:
        if seen & layer:
            return False
        seen |= layer
    if any(not (isinstance(v, (int, np.integer)) and 0 <= v < g.n) for v in seen):
        return False
    if lay.restricted:
        # a restricted layering must cover a union of whole components
        if any(g.adj[v] - seen for v in seen):
            return False
    elif len(seen) != g.n:
        return False
    idx = lay._index
    for u, v in g.edges:
        if u in idx and v in idx and abs(idx[u] - idx[v]) > 1:
            return False
    return True


def vertical_path(g: Graph, lay: Layering, v: int, target_layer: int = 0) -> list[int] | None:
    """A path from ``v`` dropping exactly one layer per step down to ``target_layer``.

    BFS layerings always admit one (follow lowest-id parents). For explicit
    layerings a depth-first search is run and ``None`` returned if it fails.
    """
    start = lay.index(v)
    if target_layer > start or target_layer < 0:
        raise UsageError(f"target layer {target_layer} not below layer {start} of vertex {v}")
    idx = lay._index
    if lay.origin == "bfs":
        path = [v]
        cur = v
        for i in range(start - 1, target_layer - 1, -1):
            cur = min(w for w in g.adj[cur] if idx.get(w) == i)
            path.append(cur)
        return path

    dead: set[int] = set()

    def walk(u: int) -> list[int] | None:
        if idx[u] == target_layer:
            return [u]
        for w in sorted(g.adj[u]):
            if idx.get(w) == idx[u] - 1 and w not in dead:
                rest = walk(w)
                if rest is not None:
                    return [u] + rest
        dead.add(u)
        return None

    return walk(v)


def bfs_path(g: Graph, sources: Iterable[int], targets: Iterable[int], allowed: set[int] | None = None) -> list[int] | None:
    """Shortest path from any source to any target inside ``allowed`` (lowest ids win ties)."""
    targets = set(targets)
    srcs = sorted(set(sources) if allowed is None else set(sources) & allowed)
    parent: dict[int, int | None] = {s: None for s in srcs}
    queue = deque(srcs)
    while queue:
        u = queue.popleft()
        if u in targets:
            path = [u]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for w in sorted(g.adj[u]):
            if w not in parent and (allowed is None or w in allowed):
                parent[w] = u
                queue.append(w)
    return None
