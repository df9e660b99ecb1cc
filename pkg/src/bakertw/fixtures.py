"""Shipped fixtures for the extraction pipeline.

A theta-ladder is a ``(q x q)``-grid sitting in a single BFS layer ``z``.
Every grid vertex has a private parent in layer ``z-1``; parents hang two at
a time off the leaves of a complete binary tree whose root is the BFS root.
Vertical paths from far-apart grid vertices therefore meet only high up in
the tree, which is where the jump paths are found.

The funnel variant replaces the tree by a single hub: every leaf has its own
parent, all of which are children of the hub. All paths between leaves then
run through the hub, so two anti-complete ones cannot exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .extractor import ExtractionConstants
from .families import grid, grid_id
from .graph import Graph, Layering, bfs_layering
from .models import MinorModel


@dataclass
class Fixture:
    name: str
    graph: Graph
    layering: Layering
    z: int
    ell: int
    grid_model: MinorModel
    constants: ExtractionConstants


def theta_ladder(d: int, k1: int = 4, k3: int | None = None, funnel: bool = False) -> Fixture:
    k3 = max(2, 2 * d) if k3 is None else k3
    q = 2 * k1 * k3
    cells = q * q
    leaves = math.ceil(cells / 2)
    grid_g = grid(q)
    edges = list(grid_g.edges)
    nxt = cells
    parents = list(range(nxt, nxt + cells))  # private parent of each grid vertex
    nxt += cells
    edges += [(v, parents[v]) for v in range(cells)]
    if not funnel:
        depth = max(1, math.ceil(math.log2(leaves)))
        tree_n = 2 ** (depth + 1) - 1
        tree = list(range(nxt, nxt + tree_n))  # heap order: children of t are 2t+1, 2t+2
        nxt += tree_n
        edges += [(tree[t], tree[(t - 1) // 2]) for t in range(1, tree_n)]
        first_leaf = 2 ** depth - 1
        leaf_of = [tree[first_leaf + v // 2] for v in range(cells)]
        root = tree[0]
        z = depth + 2
    else:
        leaf_nodes = list(range(nxt, nxt + leaves))
        nxt += leaves
        stems = list(range(nxt, nxt + leaves))
        nxt += leaves
        hub, root = nxt, nxt + 1
        nxt += 2
        edges += [(leaf_nodes[t], stems[t]) for t in range(leaves)]
        edges += [(stems[t], hub) for t in range(leaves)]
        edges.append((hub, root))
        leaf_of = [leaf_nodes[v // 2] for v in range(cells)]
        z = 5
    edges += [(parents[v], leaf_of[v]) for v in range(cells)]
    g = Graph(nxt, edges, {"coord": grid_g.labels["coord"]})
    lay = bfs_layering(g, root)
    assert lay.layers[z] == frozenset(range(cells))
    model = MinorModel(grid(q), g, {v: frozenset([v]) for v in range(cells)}, "induced")
    consts = ExtractionConstants.relaxed_mode(d, g.max_degree(), 1, k1, k3)
    name = f"theta-ladder-d{d}{'-funnel' if funnel else ''}"
    return Fixture(name, g, lay, z, 1, model, consts)


def grid_cell(q: int, a: int, b: int) -> int:
    return grid_id(q, a, b)
