"""Distance kernels over CSR adjacency arrays.

Every verifier in the package bottoms out in breadth-first search, so the
inner loops live here twice: once compiled with numba, once vectorised with
numpy. ``BAKERTW_DISABLE_NUMBA=1`` (or a missing numba install) selects the
numpy path. Both paths return identical arrays; ``-1`` marks an unreachable
vertex and ``UNREACHABLE`` marks an infinite set distance.
"""

import os

import numpy as np

UNREACHABLE = np.iinfo(np.int64).max // 4

_DISABLED = os.environ.get("BAKERTW_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and not _DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _expand_frontier(indptr, indices, frontier):
    starts = indptr[frontier]
    counts = indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    src = np.repeat(frontier, counts)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    tgt = indices[np.repeat(starts, counts) + offsets]
    return src, tgt


def bfs_distances_np(indptr, indices, sources, n):
    dist = np.full(n, -1, dtype=np.int64)
    frontier = np.unique(np.asarray(sources, dtype=np.int64))
    dist[frontier] = 0
    d = 0
    while frontier.size:
        _, tgt = _expand_frontier(indptr, indices, frontier)
        tgt = tgt[dist[tgt] < 0]
        frontier = np.unique(tgt)
        d += 1
        dist[frontier] = d
    return dist


def distance_matrix_np(indptr, indices, n):
    out = np.empty((n, n), dtype=np.int32)
    for s in range(n):
        out[s] = bfs_distances_np(indptr, indices, np.array([s], dtype=np.int64), n)
    return out


def girth_np(indptr, indices, n):
    best = UNREACHABLE
    for root in range(n):
        dist = np.full(n, -1, dtype=np.int64)
        parent = np.full(n, -1, dtype=np.int64)
        dist[root] = 0
        frontier = np.array([root], dtype=np.int64)
        d = 0
        while frontier.size and 2 * d + 1 < best:
            src, tgt = _expand_frontier(indptr, indices, frontier)
            seen = dist[tgt] >= 0
            back = seen & (tgt != parent[src])
            if back.any():
                best = min(best, int((dist[src[back]] + dist[tgt[back]]).min()) + 1)
            fresh_t = tgt[~seen]
            fresh_s = src[~seen]
            uniq, first, counts = np.unique(fresh_t, return_index=True, return_counts=True)
            if (counts > 1).any():
                best = min(best, 2 * (d + 1))
            dist[uniq] = d + 1
            parent[uniq] = fresh_s[first]
            frontier = uniq
            d += 1
    return best


def _grouped(dm, labels, k):
    idx = np.flatnonzero(labels >= 0)
    order = idx[np.argsort(labels[idx], kind="stable")]
    lab = labels[order]
    sub = dm[np.ix_(order, order)].astype(np.int64)
    sub[sub < 0] = UNREACHABLE
    if lab.size == 0:
        return sub, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    bounds = np.flatnonzero(np.r_[True, lab[1:] != lab[:-1]])
    return sub, bounds, lab[bounds]


def label_min_distances_np(dm, labels, k):
    out = np.full((k, k), UNREACHABLE, dtype=np.int64)
    sub, bounds, present = _grouped(dm, labels, k)
    if present.size:
        rows = np.minimum.reduceat(sub, bounds, axis=0)
        out[np.ix_(present, present)] = np.minimum.reduceat(rows, bounds, axis=1)
    return out


def label_max_distances_np(dm, labels, k):
    out = np.full(k, -1, dtype=np.int64)
    sub, bounds, present = _grouped(dm, labels, k)
    if present.size:
        rows = np.maximum.reduceat(sub, bounds, axis=0)
        out[present] = np.diagonal(np.maximum.reduceat(rows, bounds, axis=1))
    return out


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if numba is not None:
    from numba import njit

    @njit(cache=True)
    def _bfs_into(indptr, indices, sources, dist, queue):
        head = 0
        tail = 0
        for s in sources:
            if dist[s] < 0:
                dist[s] = 0
                queue[tail] = s
                tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u] + 1
            for p in range(indptr[u], indptr[u + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = du
                    queue[tail] = w
                    tail += 1

    @njit(cache=True)
    def bfs_distances_nb(indptr, indices, sources, n):
        dist = np.full(n, -1, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        _bfs_into(indptr, indices, sources, dist, queue)
        return dist

    @njit(cache=True)
    def distance_matrix_nb(indptr, indices, n):
        out = np.empty((n, n), dtype=np.int32)
        dist = np.empty(n, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        src = np.empty(1, dtype=np.int64)
        for s in range(n):
            dist[:] = -1
            src[0] = s
            _bfs_into(indptr, indices, src, dist, queue)
            for v in range(n):
                out[s, v] = dist[v]
        return out

    @njit(cache=True)
    def girth_nb(indptr, indices, n):
        best = UNREACHABLE
        dist = np.empty(n, dtype=np.int64)
        parent = np.empty(n, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        for root in range(n):
            dist[:] = -1
            parent[:] = -1
            dist[root] = 0
            queue[0] = root
            head = 0
            tail = 1
            while head < tail:
                u = queue[head]
                head += 1
                if 2 * dist[u] + 1 >= best:
                    break
                for p in range(indptr[u], indptr[u + 1]):
                    w = indices[p]
                    if dist[w] < 0:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        queue[tail] = w
                        tail += 1
                    elif w != parent[u]:
                        c = dist[u] + dist[w] + 1
                        if c < best:
                            best = c
        return best

    @njit(cache=True)
    def label_min_distances_nb(dm, labels, k):
        out = np.full((k, k), UNREACHABLE, dtype=np.int64)
        n = labels.shape[0]
        for i in range(n):
            li = labels[i]
            if li < 0:
                continue
            for j in range(n):
                lj = labels[j]
                if lj < 0:
                    continue
                d = dm[i, j]
                if d >= 0 and d < out[li, lj]:
                    out[li, lj] = d
        return out

    @njit(cache=True)
    def label_max_distances_nb(dm, labels, k):
        out = np.full(k, -1, dtype=np.int64)
        n = labels.shape[0]
        for i in range(n):
            li = labels[i]
            if li < 0:
                continue
            for j in range(n):
                if labels[j] != li:
                    continue
                d = dm[i, j]
                if d < 0:
                    out[li] = UNREACHABLE
                elif d > out[li]:
                    out[li] = d
        return out


NUMPY_KERNELS = {
    "bfs_distances": bfs_distances_np,
    "distance_matrix": distance_matrix_np,
    "girth": girth_np,
    "label_min_distances": label_min_distances_np,
    "label_max_distances": label_max_distances_np,
}

if numba is not None:
    NUMBA_KERNELS = {
        "bfs_distances": bfs_distances_nb,
        "distance_matrix": distance_matrix_nb,
        "girth": girth_nb,
        "label_min_distances": label_min_distances_nb,
        "label_max_distances": label_max_distances_nb,
    }
else:  # pragma: no cover
    NUMBA_KERNELS = {}

_ACTIVE = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS

bfs_distances = _ACTIVE["bfs_distances"]
distance_matrix = _ACTIVE["distance_matrix"]
girth = _ACTIVE["girth"]
label_min_distances = _ACTIVE["label_min_distances"]
label_max_distances = _ACTIVE["label_max_distances"]
