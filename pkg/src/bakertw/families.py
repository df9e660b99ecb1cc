"""Deterministic graph generators: grids, jump grids, crossing grids, subdivisions."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .errors import SpecError, UsageError
from .graph import Graph

# Grid cells use the 1-based (column, row) convention: cell (a, b) sits in
# column a and row b, and has vertex id (b - 1) * k + (a - 1).


def grid_id(k: int, a: int, b: int) -> int:
    return (b - 1) * k + (a - 1)


@dataclass(frozen=True)
class JumpSpec:
    """Jump edges ``(a, b)(a', b)`` inside row ``b`` of the ``k x k`` grid."""

    k: int
    b: int
    jumps: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "jumps", tuple(tuple(sorted(j)) for j in self.jumps))

    @property
    def d(self) -> int:
        return len(self.jumps)

    def validate(self) -> None:
        k, b, d = self.k, self.b, self.d
        if k < 1:
            raise SpecError(f"grid side k={k} must be positive")
        if k < 2 * d:
            raise SpecError(f"k={k} < 2d={2 * d}")
        if not (max(d, 1) <= b <= k - d and b <= k):
            raise SpecError(f"jump row b={b} outside [{d}, {k - d}]")
        ends: list[int] = []
        for a, a2 in self.jumps:
            if not (1 <= a <= k and 1 <= a2 <= k):
                raise SpecError(f"jump ({a}, {a2}) has a column outside [1, {k}]")
            if abs(a - a2) <= 1:
                raise SpecError(f"jump ({a}, {a2}) is not a jump: |a - a'| must exceed 1")
            ends += [a, a2]
        if len(set(ends)) != len(ends):
            raise SpecError("jump edges are not pairwise vertex-disjoint")


@dataclass(frozen=True)
class SubdivisionMap:
    """Internal vertices of each subdivided edge, listed from ``u`` to ``v`` (``u < v``)."""

    base_n: int
    paths: tuple[tuple[tuple[int, int], tuple[int, ...]], ...]

    def as_dict(self) -> dict[tuple[int, int], tuple[int, ...]]:
        return dict(self.paths)

    def counts(self) -> dict[tuple[int, int], int]:
        return {e: len(p) for e, p in self.paths}

    @property
    def is_proper(self) -> bool:
        return all(len(p) >= 1 for _, p in self.paths)

    def uniform(self) -> int | None:
        lens = {len(p) for _, p in self.paths}
        return lens.pop() if len(lens) == 1 else None

    def origin(self) -> dict[int, tuple[int, int]]:
        """Map each subdivision vertex back to its original edge."""
        return {s: e for e, p in self.paths for s in p}

    def full_path(self, u: int, v: int) -> list[int]:
        """The ``u``-to-``v`` path that replaced edge ``uv``."""
        key = (min(u, v), max(u, v))
        inner = list(self.as_dict()[key])
        if u > v:
            inner.reverse()
        return [u] + inner + [v]


def grid(k: int) -> Graph:
    if k < 1:
        raise UsageError("grid side must be positive")
    edges = []
    for b in range(1, k + 1):
        for a in range(1, k + 1):
            if a < k:
                edges.append((grid_id(k, a, b), grid_id(k, a + 1, b)))
            if b < k:
                edges.append((grid_id(k, a, b), grid_id(k, a, b + 1)))
    coords = {grid_id(k, a, b): (a, b) for a in range(1, k + 1) for b in range(1, k + 1)}
    return Graph(k * k, edges, {"coord": coords})


def jump_grid(spec: JumpSpec) -> Graph:
    spec.validate()
    g = grid(spec.k)
    extra = [(grid_id(spec.k, a, spec.b), grid_id(spec.k, a2, spec.b)) for a, a2 in spec.jumps]
    return Graph(g.n, g.edges + tuple(extra), {**g.labels, "jumpspec": spec})


def crossing_grid(k: int) -> Graph:
    """The k x k grid with both diagonals added inside every unit cell."""
    if k < 2:
        raise UsageError("crossing grid needs k >= 2")
    g = grid(k)
    extra = []
    for b in range(1, k):
        for a in range(1, k):
            extra.append((grid_id(k, a, b), grid_id(k, a + 1, b + 1)))
            extra.append((grid_id(k, a + 1, b), grid_id(k, a, b + 1)))
    return Graph(g.n, g.edges + tuple(extra), g.labels)


def subdivide(g: Graph, lengths: int | Mapping[tuple[int, int], int]) -> Graph:
    """Replace every edge ``uv`` by a path with ``lengths[uv]`` internal vertices.

    Original vertices keep their ids; new vertices are numbered in edge order.
    The result carries a ``subdivision`` label mapping back to the edges.
    """
    if isinstance(lengths, int):
        counts = {e: lengths for e in g.edges}
    else:
        counts = {}
        for (u, v), c in lengths.items():
            counts[(min(u, v), max(u, v))] = int(c)
        missing = [e for e in g.edges if e not in counts]
        if missing:
            raise UsageError(f"no subdivision count for edge {missing[0]}")
    if any(c < 0 for c in counts.values()):
        raise UsageError("subdivision counts must be nonnegative")
    nxt = g.n
    edges = []
    paths = []
    for u, v in g.edges:
        c = counts[(u, v)]
        inner = tuple(range(nxt, nxt + c))
        nxt += c
        chain = [u, *inner, v]
        edges += list(zip(chain, chain[1:]))
        paths.append(((u, v), inner))
    labels = {k: val for k, val in g.labels.items() if k in ("coord", "jumpspec")}
    labels["subdivision"] = SubdivisionMap(g.n, tuple(paths))
    return Graph(nxt, edges, labels)


def horizontal_edges(g: Graph) -> list[tuple[int, int]]:
    coords = g.labels["coord"]
    return [(u, v) for u, v in g.edges if coords[u][1] == coords[v][1]]


def apex_girth_construction(base: Graph, horizontal: Iterable[tuple[int, int]], g: int) -> Graph:
    """Stretch marked edges to length-``g`` paths and hang every vertex off a new apex.

    The apex is joined to every vertex of the stretched graph by its own
    internally disjoint path of length ``g``. Its id is stored under the
    ``apex`` label.
    """
    if g < 1:
        raise UsageError("path length g must be at least 1")
    marked = {(min(u, v), max(u, v)) for u, v in horizontal}
    unknown = marked - set(base.edges)
    if unknown:
        raise UsageError(f"marked edge {sorted(unknown)[0]} is not an edge of the base graph")
    stretched = subdivide(base, {e: (g - 1 if e in marked else 0) for e in base.edges})
    n0 = stretched.n
    apex = n0
    edges = list(stretched.edges)
    nxt = n0 + 1
    for v in range(n0):
        chain = [apex, *range(nxt, nxt + g - 1), v]
        nxt += g - 1
        edges += list(zip(chain, chain[1:]))
    return Graph(nxt, edges, {"apex": apex})


def default_apex_base(k: int) -> tuple[Graph, list[tuple[int, int]]]:
    """Stand-in base for the apex construction: ``grid(k)`` with its horizontal edges marked."""
    base = grid(k)
    return base, horizontal_edges(base)


# -- stock families ------------------------------------------------------------

def complete(t: int) -> Graph:
    return Graph(t, combinations(range(t), 2))


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise UsageError("cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def star(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def empty(n: int) -> Graph:
    return Graph(n)


def rng(seed: int) -> np.random.Generator:
    """PCG64 generator; fixtures are reproducible from the seed alone."""
    return np.random.Generator(np.random.PCG64(seed))


def tree(n: int, seed: int, max_degree: int | None = None) -> Graph:
    """Random recursive tree: vertex i attaches to a uniform earlier vertex with spare degree."""
    r = rng(seed)
    deg = [0] * n
    edges = []
    for v in range(1, n):
        cands = [u for u in range(v) if max_degree is None or deg[u] < max_degree]
        u = cands[int(r.integers(len(cands)))]
        edges.append((u, v))
        deg[u] += 1
        deg[v] += 1
    return Graph(n, edges)


def random_bounded_degree(n: int, max_degree: int, seed: int, p: float = 1.0, connected: bool = False) -> Graph:
    """Scan vertex pairs in random order, keeping each with probability ``p`` while degrees allow.

    With ``connected=True`` a random spanning tree of maximum degree
    ``max_degree`` (which must be at least 2) is laid down first.
    """
    if max_degree < 0:
        raise UsageError("max_degree must be nonnegative")
    r = rng(seed)
    deg = [0] * n
    edges: set[tuple[int, int]] = set()
    if connected and n > 1:
        if max_degree < 2 and n > 2:
            raise UsageError("a connected graph on more than 2 vertices needs max_degree >= 2")
        order = [int(x) for x in r.permutation(n)]
        for i in range(1, n):
            v = order[i]
            cands = [u for u in order[:i] if deg[u] < max_degree]
            u = cands[int(r.integers(len(cands)))]
            edges.add((min(u, v), max(u, v)))
            deg[u] += 1
            deg[v] += 1
    pairs = list(combinations(range(n), 2))
    perm = r.permutation(len(pairs))
    coins = r.random(len(pairs))
    for idx in perm:
        u, v = pairs[int(idx)]
        if (u, v) in edges or deg[u] >= max_degree or deg[v] >= max_degree:
            continue
        if coins[idx] < p:
            edges.add((u, v))
            deg[u] += 1
            deg[v] += 1
    return Graph(n, sorted(edges))


def gnp(n: int, p: float, seed: int) -> Graph:
    r = rng(seed)
    pairs = list(combinations(range(n), 2))
    keep = r.random(len(pairs)) < p
    return Graph(n, [e for e, k in zip(pairs, keep) if k])


def stock(kind: str, *args, **kwargs) -> Graph:
    table = {
        "complete": complete,
        "path": path,
        "cycle": cycle,
        "star": star,
        "empty": empty,
        "tree": tree,
        "random_bounded_degree": random_bounded_degree,
        "gnp": gnp,
        "grid": grid,
        "crossing_grid": crossing_grid,
    }
    if kind not in table:
        raise UsageError(f"unknown family {kind!r}")
    return table[kind](*args, **kwargs)
