"""Per-cluster top-N frequent bigrams for analyst inspection."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .community import Partition
from .corpus import Document


@dataclass
class ClusterSummary:
    cluster_id: int
    size: int
    top_bigrams: list[tuple[str, int]]  # count desc, ties lexicographic

    def to_dict(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "size": self.size,
            "top_bigrams": [[b, c] for b, c in self.top_bigrams],
        }


def top_bigrams(
    docs: Iterable[Document],
    n_top: int = 5,
    stopwords: set[str] | None = None,
) -> list[tuple[str, int]]:
    """Most frequent adjacent token pairs, never crossing document boundaries.

    With a stopword set, pairs containing a stopword are skipped (tokens are
    not spliced together across removed words).
    """
    if n_top < 1:
        raise ValueError("n_top must be >= 1")
    counts: Counter[str] = Counter()
    for doc in docs:
        toks = doc.tokens
        for a, b in zip(toks, toks[1:]):
            if stopwords and (a in stopwords or b in stopwords):
                continue
            counts[f"{a} {b}"] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:n_top]


def summarize_partition(
    docs: Sequence[Document],
    partition: Partition,
    n_top: int = 5,
    max_clusters: int | None = None,
    stopwords: set[str] | None = None,
) -> list[ClusterSummary]:
    """Summaries for the largest clusters, ordered by size desc (ties by id)."""
    if len(docs) != partition.n_nodes:
        raise ValueError(
            f"partition covers {partition.n_nodes} nodes, corpus has {len(docs)}"
        )
    by_cluster: dict[int, list[Document]] = {}
    for doc, cid in zip(docs, partition.assignment.tolist()):
        by_cluster.setdefault(cid, []).append(doc)
    order = sorted(by_cluster, key=lambda cid: (-len(by_cluster[cid]), cid))
    if max_clusters is not None:
        order = order[:max_clusters]
    return [
        ClusterSummary(
            cluster_id=cid,
            size=len(by_cluster[cid]),
            top_bigrams=top_bigrams(by_cluster[cid], n_top, stopwords),
        )
        for cid in order
    ]
