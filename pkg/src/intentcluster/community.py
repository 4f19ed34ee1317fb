"""Louvain community detection: modularity, greedy local moves, graph aggregation.

Weight conventions follow the adjacency-matrix view: for an undirected edge
{i, j} both directed entries ``w_ij = w_ji`` exist; a self-loop is a single
diagonal entry ``w_ii`` that counts once in the node strength
``k_i = sum_j w_ij``. With these conventions community aggregation preserves
modularity exactly, which the debug checks rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

_MIN_LEVEL_GAIN = 1e-7


class LouvainInvariantError(AssertionError):
    """Raised in debug mode when an internal modularity invariant is violated."""


@dataclass
class Partition:
    """Total assignment of node indices to dense cluster ids 0..C-1.

    For Louvain, ``levels`` holds the per-level assignments over the original
    nodes, finest to coarsest; ``assignment`` is the final (coarsest) level.
    """

    assignment: np.ndarray
    method: str  # "louvain" | "kmeans"
    levels: list[np.ndarray] = field(default_factory=list)

    @property
    def n_nodes(self) -> int:
        return len(self.assignment)

    @property
    def n_clusters(self) -> int:
        return int(self.assignment.max()) + 1 if len(self.assignment) else 0

    def members(self, cluster_id: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == cluster_id)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.n_clusters)

    def dumps(self) -> str:
        lines = [f"# method={self.method} levels={len(self.levels)}"]
        lines += [f"{i} {c}" for i, c in enumerate(self.assignment.tolist())]
        return "\n".join(lines) + "\n"

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")


def partition_loads(text: str) -> Partition:
    """Parse a :meth:`Partition.dumps` dump (levels are not round-tripped)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError("partition dump missing header line")
    header = dict(kv.split("=", 1) for kv in lines[0][1:].split())
    pairs = [ln.split() for ln in lines[1:]]
    assignment = np.empty(len(pairs), dtype=np.int64)
    for node, cid in pairs:
        assignment[int(node)] = int(cid)
    return Partition(assignment=assignment, method=header.get("method", "unknown"))


def load_partition(path: str | Path) -> Partition:
    return partition_loads(Path(path).read_text(encoding="utf-8"))


def as_assignment(partition) -> np.ndarray:
    """Accept a Partition, array, or sequence of ints; return an int64 array."""
    if isinstance(partition, Partition):
        return np.asarray(partition.assignment, dtype=np.int64)
    return np.asarray(partition, dtype=np.int64)


class WeightedGraph:
    """Symmetric weighted graph in CSR form, with separate self-loop weights."""

    def __init__(
        self,
        n_nodes: int,
        indptr: np.ndarray,
        indices: np.ndarray,
        weights: np.ndarray,
        self_weight: np.ndarray,
    ) -> None:
        self.n_nodes = n_nodes
        self.indptr = indptr
        self.indices = indices
        self.weights = weights
        self.self_weight = self_weight
        # strength k_i = w_ii + sum of off-diagonal row weights
        if len(weights):
            src = np.repeat(np.arange(n_nodes), np.diff(indptr))
            row_sums = np.bincount(src, weights=weights, minlength=n_nodes)
        else:
            row_sums = np.zeros(n_nodes)
        self.strength = self_weight + row_sums
        # 2m: every off-diagonal entry appears twice in `weights` already
        self.weight_doubled = float(self_weight.sum() + weights.sum())

    @classmethod
    def from_edges(
        cls, n_nodes: int, edges: Iterable[tuple[int, int, float]]
    ) -> "WeightedGraph":
        """Build from undirected (i, j, w) triples; (i, i, w) sets a self-loop."""
        self_weight = np.zeros(n_nodes, dtype=np.float64)
        src: list[int] = []
        dst: list[int] = []
        wts: list[float] = []
        for i, j, w in edges:
            if w < 0:
                raise ValueError(f"negative edge weight on ({i}, {j})")
            if i == j:
                self_weight[i] += w
            else:
                src += [i, j]
                dst += [j, i]
                wts += [w, w]
        return cls._from_directed(
            n_nodes,
            np.asarray(src, dtype=np.int64),
            np.asarray(dst, dtype=np.int64),
            np.asarray(wts, dtype=np.float64),
            self_weight,
        )

    @classmethod
    def from_knn_graph(cls, graph) -> "WeightedGraph":
        edges = graph.edges
        self_weight = np.zeros(graph.n_nodes, dtype=np.float64)
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        wts = np.concatenate([graph.weights, graph.weights])
        return cls._from_directed(graph.n_nodes, src, dst, wts, self_weight)

    @classmethod
    def _from_directed(cls, n_nodes, src, dst, wts, self_weight) -> "WeightedGraph":
        order = np.lexsort((dst, src))
        src, dst, wts = src[order], dst[order], wts[order]
        counts = np.bincount(src, minlength=n_nodes)
        indptr = np.zeros(n_nodes + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(n_nodes, indptr, dst, wts, self_weight)

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.weights[lo:hi]


def modularity(graph: WeightedGraph, partition) -> float:
    """Newman modularity Q of a partition, in [-1, 1]."""
    comm = as_assignment(partition)
    if len(comm) != graph.n_nodes:
        raise ValueError(
            f"partition covers {len(comm)} nodes, graph has {graph.n_nodes}"
        )
    two_m = graph.weight_doubled
    if two_m == 0:
        raise ValueError("graph has no edges")
    src = np.repeat(np.arange(graph.n_nodes), np.diff(graph.indptr))
    internal = comm[src] == comm[graph.indices]
    in_total = float(graph.weights[internal].sum() + graph.self_weight.sum())
    n_comm = int(comm.max()) + 1
    tot = np.bincount(comm, weights=graph.strength, minlength=n_comm)
    return in_total / two_m - float(((tot / two_m) ** 2).sum())


def _local_move(
    graph: WeightedGraph,
    order: np.ndarray,
    debug_check: bool,
) -> tuple[np.ndarray, float, bool]:
    """Phase 1: sweep nodes in `order`, greedily moving each to the neighboring
    community with maximal positive modularity gain, until a sweep is quiet."""
    n = graph.n_nodes
    comm = np.arange(n, dtype=np.int64)
    strength = graph.strength
    self_weight = graph.self_weight
    indptr, indices, weights = graph.indptr, graph.indices, graph.weights
    two_m = graph.weight_doubled

    tot = strength.copy()  # sum of member strengths per community
    in_w = self_weight.copy().astype(np.float64)  # ordered internal weight per community
    q = float(in_w.sum() / two_m - ((tot / two_m) ** 2).sum())

    moved_any = False
    while True:
        moves = 0
        for i in order.tolist():
            ci = int(comm[i])
            lo, hi = indptr[i], indptr[i + 1]
            nbr_comms = comm[indices[lo:hi]]
            nbr_wts = weights[lo:hi]
            link: dict[int, float] = {}
            for c, w in zip(nbr_comms.tolist(), nbr_wts.tolist()):
                link[c] = link.get(c, 0.0) + w

            k_i = float(strength[i])
            # detach i; gains below use Sigma_tot measured without i
            tot[ci] -= k_i
            in_w[ci] -= 2.0 * link.get(ci, 0.0) + self_weight[i]

            # gain(c) = k_i_in(c) - Sigma_tot(c) * k_i / 2m, up to the common
            # factor 2/2m; staying put must win ties so moves are strict gains
            stay_gain = link.get(ci, 0.0) - tot[ci] * k_i / two_m
            best_c, best_gain = ci, stay_gain
            for c, k_i_in in link.items():
                if c == ci:
                    continue
                gain = k_i_in - tot[c] * k_i / two_m
                if gain > best_gain or (gain == best_gain and best_c != ci and c < best_c):
                    best_c, best_gain = c, gain

            tot[best_c] += k_i
            in_w[best_c] += 2.0 * link.get(best_c, 0.0) + self_weight[i]
            if best_c != ci:
                comm[i] = best_c
                moves += 1
                delta = 2.0 * (best_gain - stay_gain) / two_m
                q += delta
                if debug_check:
                    _check_move(graph, comm, q, delta)
        if moves == 0:
            break
        moved_any = True
    return comm, q, moved_any


def _check_move(graph: WeightedGraph, comm: np.ndarray, q_tracked: float, delta: float) -> None:
    if delta <= 0:
        raise LouvainInvariantError(f"accepted move with non-positive gain {delta}")
    q_scratch = modularity(graph, comm)
    if abs(q_scratch - q_tracked) > 1e-9:
        raise LouvainInvariantError(
            f"tracked modularity {q_tracked} drifted from recomputed {q_scratch}"
        )


def _aggregate(graph: WeightedGraph, comm: np.ndarray, n_comm: int) -> WeightedGraph:
    """Phase 2: communities become super-nodes; intra-community weight becomes
    self-loops (preserves modularity exactly under the conventions above)."""
    src = np.repeat(np.arange(graph.n_nodes), np.diff(graph.indptr))
    csrc = comm[src]
    cdst = comm[graph.indices]
    internal = csrc == cdst
    new_self = np.bincount(csrc[internal], weights=graph.weights[internal], minlength=n_comm)
    new_self += np.bincount(comm, weights=graph.self_weight, minlength=n_comm)

    keys = csrc[~internal] * n_comm + cdst[~internal]
    if len(keys):
        uniq, inv = np.unique(keys, return_inverse=True)
        sums = np.bincount(inv, weights=graph.weights[~internal])
        new_src = (uniq // n_comm).astype(np.int64)
        new_dst = (uniq % n_comm).astype(np.int64)
    else:
        new_src = np.empty(0, dtype=np.int64)
        new_dst = np.empty(0, dtype=np.int64)
        sums = np.empty(0, dtype=np.float64)
    return WeightedGraph._from_directed(n_comm, new_src, new_dst, sums, new_self)


def louvain(
    graph: WeightedGraph,
    seed: int = 0,
    *,
    min_gain: float = _MIN_LEVEL_GAIN,
    debug_check: bool = False,
    n_restarts: int = 1,
) -> Partition:
    """Multi-level Louvain. Returns the coarsest level as the assignment, with
    every level (projected onto the original nodes) retained in ``levels``.

    Deterministic for a fixed seed; node sweep order is a fresh seeded shuffle
    per level. Iteration stops once a level improves modularity by less than
    ``min_gain``. The greedy result depends on sweep order, so ``n_restarts``
    > 1 reruns with derived seeds and keeps the highest-modularity partition
    (first found wins ties) - worthwhile on small graphs, like k-means n_init.
    """
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")
    best: Partition | None = None
    best_q = -np.inf
    for restart in range(n_restarts):
        restart_seed = seed if restart == 0 else (seed, restart)
        part = _louvain_single(graph, restart_seed, min_gain, debug_check)
        q = modularity(graph, part)
        if q > best_q:
            best, best_q = part, q
    return best


def _louvain_single(graph, seed, min_gain, debug_check) -> Partition:
    if graph.weight_doubled == 0:
        raise ValueError("graph has no edges")
    rng = np.random.default_rng(seed)
    node_map = np.arange(graph.n_nodes, dtype=np.int64)  # original node -> super-node
    levels: list[np.ndarray] = []
    work = graph
    q_prev = modularity(graph, np.arange(graph.n_nodes))

    while True:
        order = rng.permutation(work.n_nodes)
        comm, q_new, moved = _local_move(work, order, debug_check)
        uniq, comm_dense = np.unique(comm, return_inverse=True)
        level_assignment = comm_dense[node_map]
        if not moved:
            if not levels:
                levels.append(level_assignment)
            break
        levels.append(level_assignment)
        if debug_check:
            q_proj = modularity(graph, level_assignment)
            if abs(q_proj - q_new) > 1e-9:
                raise LouvainInvariantError(
                    f"aggregation drift: level Q {q_new} vs projected Q {q_proj}"
                )
            if q_new < q_prev - 1e-12:
                raise LouvainInvariantError(
                    f"level decreased modularity: {q_prev} -> {q_new}"
                )
        if q_new - q_prev < min_gain:
            break
        q_prev = q_new
        work = _aggregate(work, comm_dense, len(uniq))
        node_map = comm_dense[node_map]

    return Partition(assignment=levels[-1].copy(), method="louvain", levels=levels)
