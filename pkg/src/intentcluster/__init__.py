"""Adaptive text clustering and labeling toolkit.

Pipeline: hashed mean-pooled embeddings -> optional label-trained linear
adapter -> exact k-NN graph + Louvain (cluster count unknown) or k-means
(cluster count given) -> per-cluster bigram summaries and purity/NMI
evaluation, orchestrated behind an HTTP service and CLI.
"""

from .community import Partition, WeightedGraph, louvain, modularity
from .corpus import (
    Document,
    load_corpus,
    load_embeddings,
    save_corpus,
    save_embeddings,
    tokenize,
)
from .embed import Adapter, TrainConfig, apply_adapter, base_embed, train_adapter
from .kmeans import KmeansResult, kmeans
from .knn import KnnGraph, build_knn_graph, knn_search
from .metrics import EvalReport, evaluate, nmi, purity
from .project import ClusterJobRequest, JobResult, Project
from .summarize import ClusterSummary, summarize_partition, top_bigrams

__version__ = "0.1.0"

__all__ = [
    "Adapter",
    "ClusterJobRequest",
    "ClusterSummary",
    "Document",
    "EvalReport",
    "JobResult",
    "KmeansResult",
    "KnnGraph",
    "Partition",
    "Project",
    "TrainConfig",
    "WeightedGraph",
    "apply_adapter",
    "base_embed",
    "build_knn_graph",
    "evaluate",
    "kmeans",
    "knn_search",
    "load_corpus",
    "load_embeddings",
    "louvain",
    "modularity",
    "nmi",
    "purity",
    "save_corpus",
    "save_embeddings",
    "summarize_partition",
    "tokenize",
    "train_adapter",
]
