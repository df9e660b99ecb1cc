"""Baker-treewidth profiles and the layer-shifting approximation scheme."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import UsageError
from .graph import Graph, Layering, induced_subgraph, is_layering
from .treewidth import (
    canonical_problem,
    dp_solve,
    feasible,
    treewidth_exact,
    treewidth_upper,
)


class ChunkTooWide(UsageError):
    """A shifting chunk exceeded the width allowed for dynamic programming."""

    def __init__(self, msg: str, window: tuple[int, int, int], width: int):
        super().__init__(msg)
        self.window = window
        self.width = width


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

@dataclass
class ProfileEntry:
    ell: int
    width: int | None  # None: some window exceeded the exact cap
    lower: int
    exact: bool
    worst_window: int


@dataclass
class BakerProfile:
    layering: Layering
    mode: str
    entries: list[ProfileEntry] = field(default_factory=list)

    def values(self) -> list[int | None]:
        return [e.width for e in self.entries]

    def f(self, ell: int) -> int | None:
        return self.entries[ell - 1].width


def windows(lay: Layering, ell: int) -> list[tuple[int, set[int]]]:
    """All windows of ``ell`` consecutive layers (one window if there are fewer layers)."""
    count = max(len(lay) - ell + 1, 1)
    return [(z, lay.window(z, ell)) for z in range(count)]


def window_width(g: Graph, verts, mode: str = "exact", cap: int | None = None, budget: int | None = None):
    sub, _ = induced_subgraph(g, verts)
    if mode == "exact":
        return treewidth_exact(sub, cap=cap, budget=budget)
    if mode == "heuristic":
        return treewidth_upper(sub, "min-fill")
    raise UsageError(f"unknown mode {mode!r}")


def baker_profile(g: Graph, lay: Layering, ell_max: int, mode: str = "exact",
                  cap: int | None = None, budget: int | None = None) -> BakerProfile:
    """Largest window width for each ``ell <= ell_max``.

    Entries are forced monotone by carrying the running maximum; this only
    matters in heuristic mode, since exact widths are monotone already
    (every ``ell``-window sits inside an ``ell+1``-window).
    """
    if not is_layering(g, lay):
        raise UsageError("not a layering of the graph")
    if ell_max < 1:
        raise UsageError("ell_max must be positive")
    prof = BakerProfile(lay, mode)
    running, low = -1, -1
    over = False
    for ell in range(1, ell_max + 1):
        worst, worst_z = -1, 0
        for z, verts in windows(lay, ell):
            if not verts:
                continue
            res = window_width(g, verts, mode, cap, budget)
            if res.width is None:
                over = True
                low = max(low, res.lower)
                worst_z = z
                continue
            if res.width > worst:
                worst, worst_z = res.width, z
        running = max(running, worst)
        low = max(low, running)
        width = None if over else running
        prof.entries.append(ProfileEntry(ell, width, low, mode == "exact", worst_z))
    return prof


# ---------------------------------------------------------------------------
# Shifting
# ---------------------------------------------------------------------------

def parse_eps(eps) -> Fraction:
    try:
        q = Fraction(str(eps)) if not isinstance(eps, Fraction) else eps
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad epsilon {eps!r}") from exc
    if not (0 < q <= 1):
        raise UsageError("epsilon must lie in (0, 1]")
    return q


def shift_modulus(eps) -> int:
    return math.ceil(1 / parse_eps(eps))


@dataclass
class PtasResult:
    problem: str
    eps: Fraction
    k: int
    shift_values: list[int]
    shift: int
    value: int
    witness: frozenset[int]
    opt: int | None = None
    ratio: float | None = None


def _layer_union(lay: Layering, lo: int, hi: int) -> set[int]:
    out: set[int] = set()
    for i in range(max(lo, 0), min(hi, len(lay) - 1) + 1):
        out |= lay.layers[i]
    return out


def chunks_for_shift(problem: str, n_layers: int, k: int, s: int) -> list[tuple[int, int, int, int]]:
    """Chunks as ``(lo, hi, core_lo, core_hi)`` layer ranges (inclusive).

    Independent set: layers congruent to ``s`` mod ``k`` are deleted and each
    maximal run of kept layers is a chunk. Vertex cover: chunks run from one
    layer congruent to ``s`` to the next, sharing the boundary layer.
    Dominating set: cores are blocks of ``k`` layers starting at layers
    congruent to ``s``, each padded with one extra layer on either side.
    """
    last = n_layers - 1
    if problem == "max_independent_set":
        if k == 1:
            return [(0, last, 0, last)]
        out, lo = [], None
        for i in range(n_layers + 1):
            kept = i <= last and i % k != s
            if kept and lo is None:
                lo = i
            if not kept and lo is not None:
                out.append((lo, i - 1, lo, i - 1))
                lo = None
        return out
    if problem == "min_vertex_cover":
        cuts = sorted({0, last} | {i for i in range(n_layers) if i % k == s})
        if len(cuts) == 1:
            return [(0, last, 0, last)]
        return [(a, b, a, b) for a, b in zip(cuts, cuts[1:])]
    starts = sorted({0} | {i for i in range(n_layers) if i % k == s})
    ends = [b - 1 for b in starts[1:]] + [last]
    return [(a - 1, b + 1, a, b) for a, b in zip(starts, ends)]


def _solve_chunk(g: Graph, lay: Layering, problem: str, chunk, s: int, max_width: int | None):
    lo, hi, clo, chi = chunk
    verts = _layer_union(lay, lo, hi)
    if not verts:
        return frozenset()
    sub, mapping = induced_subgraph(g, verts)
    back = {i: v for v, i in mapping.items()}
    td = treewidth_upper(sub, "min-fill").decomposition
    if max_width is not None and td.width > max_width:
        raise ChunkTooWide(f"shift {s}: layers {lo}..{hi} give width {td.width} > {max_width}",
                           (s, max(lo, 0), min(hi, len(lay) - 1)), td.width)
    required = None
    if problem == "min_dominating_set":
        required = {mapping[v] for v in _layer_union(lay, clo, chi)}
    _, w = dp_solve(sub, td, problem, required)
    return frozenset(back[x] for x in w)


def ptas(g: Graph, lay: Layering, eps, problem: str, max_width: int | None = None,
         oracle: bool = False) -> PtasResult:
    problem = canonical_problem(problem)
    q = parse_eps(eps)
    k = math.ceil(1 / q)
    if not is_layering(g, lay) or lay.restricted:
        raise UsageError("need a layering of the whole graph")
    n_layers = len(lay)
    shifts = [0] if (problem == "max_independent_set" and k == 1) else list(range(k))
    values, sols = [], []
    for s in shifts:
        sol: set[int] = set()
        for chunk in chunks_for_shift(problem, n_layers, k, s):
            sol |= _solve_chunk(g, lay, problem, chunk, s, max_width)
        sol = frozenset(sol)
        assert feasible(g, problem, sol), f"shift {s} produced an infeasible solution"
        values.append(len(sol))
        sols.append(sol)
    pick = max if problem == "max_independent_set" else min
    best_val = pick(values)
    i = values.index(best_val)  # lowest shift wins ties
    res = PtasResult(problem, q, k, values, shifts[i], best_val, sols[i])
    if oracle:
        res.opt = opt_oracle(g, problem)
        res.ratio = 1.0 if res.opt == 0 else best_val / res.opt
    return res


def guarantee_holds(res: PtasResult) -> bool:
    """Check the approximation contract against ``res.opt``."""
    if res.opt is None:
        raise UsageError("no optimum recorded")
    k, opt, val = res.k, res.opt, res.value
    if res.problem == "max_independent_set":
        return val * k >= (k - 1) * opt
    if res.problem == "min_vertex_cover":
        return val * k <= (k + 1) * opt
    return val * k <= (k + 2) * opt


# ---------------------------------------------------------------------------
# Exhaustive optimum
# ---------------------------------------------------------------------------

ORACLE_LIMIT = 24


def opt_oracle(g: Graph, problem: str, limit: int = ORACLE_LIMIT) -> int:
    """Exact optimum by bitmask branch and bound, independent of the DP."""
    problem = canonical_problem(problem)
    if g.n > limit:
        raise UsageError(f"oracle limited to {limit} vertices (got {g.n})")
    masks = g.neighbour_masks()
    full = (1 << g.n) - 1
    if problem == "max_independent_set":
        return _mis(masks, full, 0, [0])
    if problem == "min_vertex_cover":
        best = [g.n]
        _mvc(masks, full, 0, best)
        return best[0]
    best = [g.n]
    delta = g.max_degree()
    _mds(masks, full, full, 0, delta, best)
    return best[0]


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mis(masks, alive: int, size: int, best: list[int]) -> int:
    if size + alive.bit_count() <= best[0]:
        return best[0]
    # vertices of degree <= 1 can always be taken
    changed = True
    while changed:
        changed = False
        for v in _bits(alive):
            if (masks[v] & alive).bit_count() <= 1:
                alive &= ~(masks[v] | (1 << v))
                size += 1
                changed = True
                break
    if not alive:
        best[0] = max(best[0], size)
        return best[0]
    v = max(_bits(alive), key=lambda x: ((masks[x] & alive).bit_count(), -x))
    _mis(masks, alive & ~(masks[v] | (1 << v)), size + 1, best)
    _mis(masks, alive & ~(1 << v), size, best)
    return best[0]


def _mvc(masks, alive: int, size: int, best: list[int]) -> None:
    if size >= best[0]:
        return
    v, dv = -1, 0
    for x in _bits(alive):
        d = (masks[x] & alive).bit_count()
        if d > dv:
            v, dv = x, d
    if dv == 0:
        best[0] = size
        return
    # either v is in the cover, or all its live neighbours are
    _mvc(masks, alive & ~(1 << v), size + 1, best)
    nb = masks[v] & alive
    _mvc(masks, alive & ~nb & ~(1 << v), size + nb.bit_count(), best)


def _mds(masks, undominated: int, full: int, size: int, delta: int, best: list[int]) -> None:
    if not undominated:
        best[0] = min(best[0], size)
        return
    if size + math.ceil(undominated.bit_count() / (delta + 1)) >= best[0]:
        return
    # branch on the undominated vertex with the fewest ways to be dominated
    v = min(_bits(undominated), key=lambda x: ((masks[x] | (1 << x)).bit_count(), x))
    opts = sorted(_bits(masks[v] | (1 << v)),
                  key=lambda w: (-((masks[w] | (1 << w)) & undominated).bit_count(), w))
    for w in opts:
        _mds(masks, undominated & ~(masks[w] | (1 << w)), full, size + 1, delta, best)
