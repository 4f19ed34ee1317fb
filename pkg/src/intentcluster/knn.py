"""Exact k-nearest-neighbor search and union-symmetrized graph construction.

Search runs in two stages per query block. A float32 distance matrix built
with the blocked expansion ``|x-y|^2 = |x|^2 + |y|^2 - 2 x.y`` filters
candidates under a rigorous rounding-error bound, then candidate distances
are recomputed exactly in float64 pair by pair. Only the second stage decides
the result, and its arithmetic is independent of block shape, so the output
is identical for any block size or thread count. BLAS is pinned to one
thread during the search so ``threads`` is the only parallelism knob.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

DEFAULT_K = 10
_DEFAULT_BLOCK = 512
_TIE_PAD = 8


@dataclass
class KnnGraph:
    """Undirected graph over row indices: edge (i, j) exists iff j is among
    i's k nearest or i is among j's k nearest."""

    n_nodes: int
    edges: np.ndarray  # (E, 2) int64, i < j, lexicographically sorted
    weights: np.ndarray  # (E,) float64, all 1.0 here
    k_used: int

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in self.edges}

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_nodes, dtype=np.int64)
        np.add.at(deg, self.edges[:, 0], 1)
        np.add.at(deg, self.edges[:, 1], 1)
        return deg

    def dumps(self) -> str:
        """Text dump, one `i j weight` line per edge."""
        lines = [f"{i} {j} {w}" for (i, j), w in zip(self.edges.tolist(), self.weights.tolist())]
        return "\n".join(lines) + ("\n" if lines else "")

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")


def _exact_sq_dists(x64: np.ndarray, rows: np.ndarray, cand: np.ndarray) -> np.ndarray:
    # (x_i - x_j)^2 summed over a fixed-length last axis: the reduction order
    # depends only on the dimension, never on how queries were blocked.
    diff = x64[rows][:, None, :] - x64[cand]
    return np.einsum("bkd,bkd->bk", diff, diff)


def _search_block(
    x32: np.ndarray,
    x64: np.ndarray,
    n32: np.ndarray,
    bound: np.ndarray,
    start: int,
    stop: int,
    k: int,
    out_idx: np.ndarray,
    out_dist: np.ndarray,
) -> None:
    n = x32.shape[0]
    d32 = (x32[start:stop] * np.float32(-2.0)) @ x32.T
    d32 += n32[start:stop, None]
    d32 += n32[None, :]
    rows = np.arange(start, stop)
    d32[rows - start, rows] = np.inf  # exclude self

    kk = min(k + _TIE_PAD, n - 1)
    cand_idx = np.argpartition(d32, kk - 1, axis=1)[:, :kk]
    cand32 = np.take_along_axis(d32, cand_idx, axis=1)
    # everything at float32 distance <= kth + bound might belong to the exact
    # top k; the buffer is sufficient when its worst member is past that
    kth32 = np.partition(cand32, k - 1, axis=1)[:, k - 1]
    thresh = _round_up_f32(kth32.astype(np.float64) + bound[rows])
    safe = (cand32.max(axis=1) > thresh) if kk < n - 1 else np.ones(len(rows), bool)

    cand64 = _exact_sq_dists(x64, rows, cand_idx)
    by_index = np.argsort(cand_idx, axis=1)
    cand_idx = np.take_along_axis(cand_idx, by_index, axis=1)
    cand64 = np.take_along_axis(cand64, by_index, axis=1)
    by_val = np.argsort(cand64, axis=1, kind="stable")  # (distance, index) order
    out_idx[start:stop] = np.take_along_axis(cand_idx, by_val, axis=1)[:, :k]
    out_dist[start:stop] = np.take_along_axis(cand64, by_val, axis=1)[:, :k]

    for r in np.flatnonzero(~safe).tolist():
        # possible tie/rounding overflow past the buffer: rescan the whole row
        cand = np.flatnonzero(d32[r] <= thresh[r])
        exact = _exact_sq_dists(x64, rows[r : r + 1], cand[None, :])[0]
        order = np.lexsort((cand, exact))[:k]
        out_idx[start + r] = cand[order]
        out_dist[start + r] = exact[order]


def _round_up_f32(values: np.ndarray) -> np.ndarray:
    return np.nextafter(values.astype(np.float32), np.float32(np.inf))


def knn_search(
    matrix: np.ndarray,
    k: int = DEFAULT_K,
    *,
    block_size: int = _DEFAULT_BLOCK,
    threads: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact k nearest neighbors of every row among the other rows.

    Returns ``(indices, distances)``, both (N, k), distances squared-L2
    ascending with ties broken by smaller index. Independent of ``block_size``
    and ``threads``.
    """
    n = matrix.shape[0]
    if k >= n:
        raise ValueError("k must be < N")
    if k < 1:
        raise ValueError("k must be >= 1")
    if block_size < 1:
        raise ValueError("block_size must be >= 1")

    x32 = np.ascontiguousarray(matrix, dtype=np.float32)
    x64 = x32.astype(np.float64)
    n32 = np.einsum("ij,ij->i", x32, x32)
    n64 = np.einsum("ij,ij->i", x64, x64)
    # absolute error of the float32 expansion, padded well past the worst case
    gamma = 16.0 * (x32.shape[1] + 2) * np.finfo(np.float32).eps
    bound = 2.0 * gamma * (n64 + n64.max())

    out_idx = np.empty((n, k), dtype=np.int64)
    out_dist = np.empty((n, k), dtype=np.float64)
    starts = list(range(0, n, block_size))
    with threadpool_limits(limits=1):
        if threads <= 1 or len(starts) == 1:
            for s in starts:
                _search_block(
                    x32, x64, n32, bound, s, min(s + block_size, n), k, out_idx, out_dist
                )
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [
                    pool.submit(
                        _search_block,
                        x32, x64, n32, bound, s, min(s + block_size, n), k,
                        out_idx, out_dist,
                    )
                    for s in starts
                ]
                for f in futures:
                    f.result()
    return out_idx, out_dist


def build_knn_graph(
    matrix: np.ndarray,
    k: int = DEFAULT_K,
    *,
    block_size: int = _DEFAULT_BLOCK,
    threads: int = 1,
) -> KnnGraph:
    """Union-symmetrized k-NN graph with unit edge weights."""
    n = matrix.shape[0]
    idx, _ = knn_search(matrix, k, block_size=block_size, threads=threads)
    src = np.repeat(np.arange(n, dtype=np.int64), k)
    dst = idx.reshape(-1)
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    # dedupe the two directions via a packed key
    packed = lo * n + hi
    unique = np.unique(packed)
    edges = np.column_stack((unique // n, unique % n))
    weights = np.ones(len(edges), dtype=np.float64)
    return KnnGraph(n_nodes=n, edges=edges, weights=weights, k_used=k)
