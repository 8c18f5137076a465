"""Bounded BFS kernels over CSR adjacency.

Two interchangeable implementations are provided: numba-jitted loops for
large graphs and a vectorized pure-numpy fallback. The numpy path is used
when the environment variable ``OPENREL_NO_NUMBA`` is set to ``1`` (or
``true``/``yes``) or when numba is not importable. Both implementations are
exported so benchmarks and tests can compare them directly.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_disabled_by_env() -> bool:
    return os.environ.get("OPENREL_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")


def bfs_distances_numpy(indptr: np.ndarray, dst: np.ndarray, source: int, max_hops: int) -> np.ndarray:
    """Hop distances from ``source``, capped at ``max_hops``; -1 if unreached."""
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int32)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    depth = 0
    while frontier.size > 0 and depth < max_hops:
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        # Gather every adjacency slice of the frontier in one fancy-index pass.
        cum = np.zeros(counts.shape[0], dtype=np.int64)
        np.cumsum(counts[:-1], out=cum[1:])
        gather = np.repeat(starts - cum, counts) + np.arange(total, dtype=np.int64)
        neighbors = dst[gather]
        fresh = np.unique(neighbors[dist[neighbors] < 0])
        if fresh.size == 0:
            break
        dist[fresh] = depth + 1
        frontier = fresh
        depth += 1
    return dist


def pair_hop_buckets_numpy(
    indptr: np.ndarray,
    dst: np.ndarray,
    heads: np.ndarray,
    tails: np.ndarray,
    max_hops: int,
) -> np.ndarray:
    """Bucket counts for pair hop distances: [1-hop, ..., max_hops-hop, beyond].

    ``heads`` must be sorted so consecutive equal heads reuse one BFS.
    """
    counts = np.zeros(max_hops + 1, dtype=np.int64)
    dist: np.ndarray | None = None
    prev_head = -1
    for p in range(heads.shape[0]):
        head = int(heads[p])
        if head != prev_head:
            dist = bfs_distances_numpy(indptr, dst, head, max_hops)
            prev_head = head
        assert dist is not None
        d = int(dist[tails[p]])
        if 1 <= d <= max_hops:
            counts[d - 1] += 1
        else:
            counts[max_hops] += 1
    return counts


_HAS_NUMBA = False
bfs_distances_numba = None
pair_hop_buckets_numba = None

if not _numba_disabled_by_env():
    try:
        from numba import njit

        _HAS_NUMBA = True
    except ImportError:
        _HAS_NUMBA = False

if _HAS_NUMBA:

    @njit(cache=True)
    def _bfs_fill(indptr, dst, source, max_hops, dist, frontier, scratch):  # pragma: no cover - jitted
        n = dist.shape[0]
        for i in range(n):
            dist[i] = -1
        dist[source] = 0
        frontier[0] = source
        frontier_len = 1
        depth = 0
        while frontier_len > 0 and depth < max_hops:
            next_len = 0
            for i in range(frontier_len):
                u = frontier[i]
                for j in range(indptr[u], indptr[u + 1]):
                    v = dst[j]
                    if dist[v] < 0:
                        dist[v] = depth + 1
                        scratch[next_len] = v
                        next_len += 1
            for i in range(next_len):
                frontier[i] = scratch[i]
            frontier_len = next_len
            depth += 1

    @njit(cache=True)
    def _bfs_distances_numba(indptr, dst, source, max_hops):  # pragma: no cover - jitted
        n = indptr.shape[0] - 1
        dist = np.empty(n, dtype=np.int32)
        frontier = np.empty(n, dtype=np.int64)
        scratch = np.empty(n, dtype=np.int64)
        _bfs_fill(indptr, dst, source, max_hops, dist, frontier, scratch)
        return dist

    @njit(cache=True)
    def _pair_hop_buckets_numba(indptr, dst, heads, tails, max_hops):  # pragma: no cover - jitted
        n = indptr.shape[0] - 1
        counts = np.zeros(max_hops + 1, dtype=np.int64)
        dist = np.empty(n, dtype=np.int32)
        frontier = np.empty(n, dtype=np.int64)
        scratch = np.empty(n, dtype=np.int64)
        prev_head = -1
        for p in range(heads.shape[0]):
            head = heads[p]
            if head != prev_head:
                _bfs_fill(indptr, dst, head, max_hops, dist, frontier, scratch)
                prev_head = head
            d = dist[tails[p]]
            if 1 <= d <= max_hops:
                counts[d - 1] += 1
            else:
                counts[max_hops] += 1
        return counts

    bfs_distances_numba = _bfs_distances_numba
    pair_hop_buckets_numba = _pair_hop_buckets_numba


def backend_name() -> str:
    """Name of the active kernel backend: ``numba`` or ``numpy``."""
    return "numba" if _HAS_NUMBA else "numpy"


def bfs_distances(indptr: np.ndarray, dst: np.ndarray, source: int, max_hops: int) -> np.ndarray:
    """Hop distances from ``source`` over a CSR graph, capped at ``max_hops``.

    Returns an int32 array of length n_nodes; unreached nodes hold -1.
    """
    if _HAS_NUMBA:
        return bfs_distances_numba(indptr, dst, source, max_hops)
    return bfs_distances_numpy(indptr, dst, source, max_hops)


def pair_hop_buckets(
    indptr: np.ndarray,
    dst: np.ndarray,
    heads: np.ndarray,
    tails: np.ndarray,
    max_hops: int,
) -> np.ndarray:
    """Bucket pair distances into [1-hop, ..., max_hops-hop, beyond].

    Pairs are processed sorted by head internally so repeated heads share
    one BFS pass.
    """
    order = np.argsort(heads, kind="stable")
    heads_sorted = np.ascontiguousarray(heads[order])
    tails_sorted = np.ascontiguousarray(tails[order])
    if _HAS_NUMBA:
        return pair_hop_buckets_numba(indptr, dst, heads_sorted, tails_sorted, max_hops)
    return pair_hop_buckets_numpy(indptr, dst, heads_sorted, tails_sorted, max_hops)
