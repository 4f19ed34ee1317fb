"""End-to-end phase timing on synthetic corpora of increasing size.

Partitions are deterministic for a fixed seed; timings are not. The k-NN
phase is the one that scales with the ``threads`` knob.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .community import WeightedGraph, louvain
from .embed import base_embed
from .knn import build_knn_graph
from .synth import grouped_corpus

BENCH_DIM = 32
BENCH_KNN_K = 10
BENCH_GROUPS = 20


@dataclass
class BenchRow:
    size: int
    threads: int
    embed_ms: float
    knn_ms: float
    cluster_ms: float

    @property
    def total_ms(self) -> float:
        return self.embed_ms + self.knn_ms + self.cluster_ms


def run_bench(
    sizes: list[int],
    threads: list[int],
    seed: int = 0,
    *,
    dim: int = BENCH_DIM,
    knn_k: int = BENCH_KNN_K,
) -> list[BenchRow]:
    """One full embed -> k-NN graph -> Louvain run per (size, threads) pair."""
    rows: list[BenchRow] = []
    for size in sizes:
        docs, _ = grouped_corpus(size, min(BENCH_GROUPS, size), seed)
        for t in threads:
            t0 = time.perf_counter()
            emb = base_embed(docs, dim, seed)
            t1 = time.perf_counter()
            graph = build_knn_graph(emb, min(knn_k, size - 1), threads=t)
            t2 = time.perf_counter()
            louvain(WeightedGraph.from_knn_graph(graph), seed=seed)
            t3 = time.perf_counter()
            rows.append(
                BenchRow(
                    size=size,
                    threads=t,
                    embed_ms=(t1 - t0) * 1e3,
                    knn_ms=(t2 - t1) * 1e3,
                    cluster_ms=(t3 - t2) * 1e3,
                )
            )
    return rows


def bench_csv(rows: list[BenchRow]) -> str:
    lines = ["size,threads,embed_ms,knn_ms,cluster_ms,total_ms"]
    for r in rows:
        lines.append(
            f"{r.size},{r.threads},{r.embed_ms:.3f},{r.knn_ms:.3f},"
            f"{r.cluster_ms:.3f},{r.total_ms:.3f}"
        )
    return "\n".join(lines) + "\n"


def knn_thread_ratios(rows: list[BenchRow], base: int = 1, other: int = 4) -> list[str]:
    """Informational speedup report: knn_ms at `base` threads over `other` threads."""
    by_size: dict[int, dict[int, float]] = {}
    for r in rows:
        by_size.setdefault(r.size, {})[r.threads] = r.knn_ms
    lines = []
    for size, per_thread in sorted(by_size.items()):
        if base in per_thread and other in per_thread and per_thread[other] > 0:
            ratio = per_thread[base] / per_thread[other]
            lines.append(
                f"size={size}: knn_ms threads={base} -> {per_thread[base]:.1f}, "
                f"threads={other} -> {per_thread[other]:.1f}, speedup x{ratio:.2f}"
            )
    return lines


def size_scaling_report(rows: list[BenchRow], threads: int = 1) -> list[str]:
    """Informational growth report: end-to-end time ratio between consecutive
    sizes, against the quadratic worst case of the exact k-NN phase."""
    at = sorted((r.size, r.total_ms) for r in rows if r.threads == threads)
    lines = []
    for (n1, t1), (n2, t2) in zip(at, at[1:]):
        if t1 > 0:
            growth = n2 / n1
            lines.append(
                f"threads={threads}: total_ms {n1} -> {n2}: x{t2 / t1:.2f} "
                f"(size x{growth:.1f}, quadratic bound x{growth ** 2:.1f})"
            )
    return lines
