"""Project state and the analyst loop: cluster, inspect, label, adapt, re-cluster.

A project owns the corpus, base and adapted embeddings, the authoritative
label store (documents mirror it), the latest full-corpus partition, child
partitions from sub-clustering, and a replayable job history. Clustering
never mutates labels and labeling never mutates partitions; the analyst
triggers re-clustering explicitly.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import corpus as corpus_io
from .community import Partition, WeightedGraph, louvain
from .corpus import Document
from .embed import (
    Adapter,
    TrainConfig,
    apply_adapter,
    base_embed,
    load_adapter,
    save_adapter,
    train_adapter,
)
from .kmeans import DEFAULT_FIXED_K, kmeans
from .knn import build_knn_graph
from .metrics import EvalReport, evaluate
from .summarize import ClusterSummary, summarize_partition

DEFAULT_EMBED_DIM = 64


@dataclass
class ClusterJobRequest:
    mode: str  # "auto" | "fixed_k"
    k: int | None = None
    knn_k: int = 10
    seed: int = 0
    scope: list[str] | None = None  # doc ids; None = whole corpus

    def __post_init__(self) -> None:
        if self.mode not in ("auto", "fixed_k"):
            raise ValueError(f"mode must be 'auto' or 'fixed_k', got '{self.mode}'")
        if self.mode == "fixed_k" and self.k is not None and self.k < 1:
            raise ValueError("fixed_k requires k >= 1")
        if self.knn_k < 1:
            raise ValueError("knn_k must be >= 1")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "k": self.k,
            "knn_k": self.knn_k,
            "seed": self.seed,
            "scope": self.scope,
        }


@dataclass
class JobResult:
    partition: Partition
    summaries: list[ClusterSummary]
    report: EvalReport | None
    timings: dict[str, float]  # phase -> milliseconds
    digest: str
    scope_rows: np.ndarray  # corpus row index per partition node


@dataclass
class JobRecord:
    job_id: int
    request: dict
    status: str  # queued | running | done | failed
    timings: dict[str, float] = field(default_factory=dict)
    partition_digest: str | None = None
    n_clusters: int | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "request": self.request,
            "status": self.status,
            "timings": self.timings,
            "partition_digest": self.partition_digest,
            "n_clusters": self.n_clusters,
            "error": self.error,
        }


def _partition_digest(partition: Partition, summaries: list[ClusterSummary]) -> str:
    h = hashlib.sha256()
    h.update(partition.method.encode())
    h.update(np.ascontiguousarray(partition.assignment, dtype="<i8").tobytes())
    h.update(json.dumps([s.to_dict() for s in summaries]).encode())
    return h.hexdigest()


class Project:
    """One analyst workspace. Label writes are serialized through a lock."""

    def __init__(self, name: str, embed_dim: int = DEFAULT_EMBED_DIM, embed_seed: int = 0):
        self.name = name
        self.embed_dim = embed_dim
        self.embed_seed = embed_seed
        self.docs: list[Document] = []
        self.id_to_row: dict[str, int] = {}
        self.base_embeddings: np.ndarray | None = None
        self.adapted_embeddings: np.ndarray | None = None
        self.adapter: Adapter | None = None
        self.labels: dict[str, str] = {}
        self.revision = 0
        self.partition: Partition | None = None
        self.subpartitions: dict[int, JobResult] = {}  # parent cluster id -> result
        self.jobs: list[JobRecord] = []
        self._label_lock = threading.Lock()
        self._jobs_lock = threading.Lock()

    # -- corpus ---------------------------------------------------------

    def set_corpus(self, docs: list[Document]) -> None:
        if not docs:
            raise ValueError("corpus is empty")
        self.docs = docs
        self.id_to_row = {doc.id: i for i, doc in enumerate(docs)}
        self.base_embeddings = base_embed(docs, self.embed_dim, self.embed_seed)
        self.adapted_embeddings = None
        self.adapter = None
        self.partition = None
        self.subpartitions = {}
        # corpus labels seed the store; the store stays authoritative afterwards
        self.labels = {doc.id: doc.label for doc in docs if doc.label is not None}

    @property
    def n_docs(self) -> int:
        return len(self.docs)

    @property
    def labeled_fraction(self) -> float:
        return len(self.labels) / self.n_docs if self.docs else 0.0

    def active_embeddings(self) -> np.ndarray:
        if self.base_embeddings is None:
            raise ValueError("no corpus loaded")
        return (
            self.adapted_embeddings
            if self.adapted_embeddings is not None
            else self.base_embeddings
        )

    # -- clustering -----------------------------------------------------

    def _resolve_scope(self, scope: list[str] | None) -> np.ndarray:
        if scope is None:
            return np.arange(self.n_docs, dtype=np.int64)
        rows = []
        for doc_id in scope:
            row = self.id_to_row.get(doc_id)
            if row is None:
                raise ValueError(f"unknown document id '{doc_id}' in scope")
            rows.append(row)
        return np.array(sorted(set(rows)), dtype=np.int64)

    def new_job_record(self, request: ClusterJobRequest) -> JobRecord:
        """Reserve a job id up front so callers can poll before execution starts."""
        with self._jobs_lock:
            record = JobRecord(job_id=len(self.jobs), request=request.to_dict(), status="queued")
            self.jobs.append(record)
            return record

    def run_cluster_job(
        self,
        request: ClusterJobRequest,
        threads: int = 1,
        record: JobRecord | None = None,
    ) -> JobResult:
        """Cluster the scope: k-NN graph + Louvain in auto mode, k-means with a
        fixed k otherwise. Attaches summaries, and an EvalReport when the label
        store covers the whole scope."""
        if record is None:
            record = self.new_job_record(request)
        record.request = request.to_dict()
        record.status = "running"
        try:
            result = self._execute(request, threads)
        except Exception as exc:
            record.status = "failed"
            record.error = str(exc)
            raise
        record.status = "done"
        record.timings = result.timings
        record.partition_digest = result.digest
        record.n_clusters = result.partition.n_clusters
        if request.scope is None:
            self.partition = result.partition
            self.subpartitions = {}
        return result

    def _execute(self, request: ClusterJobRequest, threads: int) -> JobResult:
        rows = self._resolve_scope(request.scope)
        if len(rows) < 2:
            raise ValueError(f"scope has {len(rows)} documents; need at least 2")
        emb = self.active_embeddings()[rows]
        scope_docs = [self.docs[int(r)] for r in rows]

        t0 = time.perf_counter()
        if request.mode == "auto":
            knn_k = min(request.knn_k, len(rows) - 1)
            graph = build_knn_graph(emb, knn_k, threads=threads)
            t1 = time.perf_counter()
            partition = louvain(WeightedGraph.from_knn_graph(graph), seed=request.seed)
            t2 = time.perf_counter()
            timings = {
                "knn_ms": (t1 - t0) * 1e3,
                "cluster_ms": (t2 - t1) * 1e3,
                "total_ms": (t2 - t0) * 1e3,
            }
        else:
            k = request.k if request.k is not None else DEFAULT_FIXED_K
            if k > len(rows):
                raise ValueError(f"k={k} exceeds scope size {len(rows)}")
            result = kmeans(emb, k, seed=request.seed)
            partition = result.partition
            t1 = time.perf_counter()
            timings = {"cluster_ms": (t1 - t0) * 1e3, "total_ms": (t1 - t0) * 1e3}

        summaries = summarize_partition(scope_docs, partition)
        report = None
        if all(doc.id in self.labels for doc in scope_docs):
            report = evaluate(partition, [self.labels[doc.id] for doc in scope_docs])
        return JobResult(
            partition=partition,
            summaries=summaries,
            report=report,
            timings=timings,
            digest=_partition_digest(partition, summaries),
            scope_rows=rows,
        )

    def subcluster(
        self,
        cluster_id: int,
        request: ClusterJobRequest,
        record: JobRecord | None = None,
    ) -> JobResult:
        """Re-cluster one cluster's members; the child partition is kept under
        the parent cluster id for the UI's nested view."""
        try:
            members = self._cluster_members(cluster_id)
            if len(members) < 2:
                raise ValueError(
                    f"cluster {cluster_id} has {len(members)} member: nothing to sub-cluster"
                )
        except ValueError as exc:
            if record is not None:
                record.status = "failed"
                record.error = str(exc)
            raise
        scoped = ClusterJobRequest(
            mode=request.mode,
            k=request.k,
            knn_k=request.knn_k,
            seed=request.seed,
            scope=[self.docs[int(r)].id for r in members],
        )
        result = self.run_cluster_job(scoped, record=record)
        self.subpartitions[cluster_id] = result
        return result

    def _cluster_members(self, cluster_id: int) -> np.ndarray:
        if self.partition is None:
            raise ValueError("no clustering job has run yet")
        if not (0 <= cluster_id < self.partition.n_clusters):
            raise ValueError(f"unknown cluster id {cluster_id}")
        return self.partition.members(cluster_id)

    # -- labeling -------------------------------------------------------

    def bulk_label(self, cluster_id: int, label: str) -> tuple[int, int]:
        """Assign ``label`` to every member of a cluster (overwriting).
        Returns (docs labeled, new revision)."""
        members = self._cluster_members(cluster_id)
        return self.label_docs([self.docs[int(r)].id for r in members], label)

    def label_docs(self, doc_ids: list[str], label: str) -> tuple[int, int]:
        if not label.strip():
            raise ValueError("label must be non-empty")
        for doc_id in doc_ids:
            if doc_id not in self.id_to_row:
                raise ValueError(f"unknown document id '{doc_id}'")
        with self._label_lock:
            for doc_id in doc_ids:
                self.labels[doc_id] = label
                self.docs[self.id_to_row[doc_id]].label = label
            self.revision += 1
            return len(doc_ids), self.revision

    # -- adaptation -----------------------------------------------------

    def retrain_adapter(self, cfg: TrainConfig | None = None) -> Adapter:
        """Train the projection on the current label store and refresh the
        adapted embeddings; subsequent jobs use them."""
        cfg = cfg or TrainConfig()
        fraction = self.labeled_fraction
        if fraction < cfg.labeled_fraction_threshold:
            raise ValueError(
                f"labeled fraction {fraction:.4f} below threshold "
                f"{cfg.labeled_fraction_threshold:.4f}"
            )
        row_labels = {self.id_to_row[doc_id]: label for doc_id, label in self.labels.items()}
        if self.base_embeddings is None:
            raise ValueError("no corpus loaded")
        adapter = train_adapter(self.base_embeddings, row_labels, cfg)
        self.adapter = adapter
        self.adapted_embeddings = apply_adapter(self.base_embeddings, adapter)
        return adapter

    # -- evaluation -----------------------------------------------------

    def eval_report(self) -> EvalReport:
        """Latest partition scored against the label store (must be total)."""
        if self.partition is None:
            raise ValueError("no clustering job has run yet")
        unlabeled = self.n_docs - len(self.labels)
        if unlabeled:
            raise ValueError(f"{unlabeled} documents have no reference label")
        truth = [self.labels[doc.id] for doc in self.docs]
        return evaluate(self.partition, truth)

    # -- persistence ----------------------------------------------------

    def save(self, directory: str | Path) -> None:
        """Persist as independently inspectable artifacts: corpus file,
        embedding files, adapter file, labels JSON, jobs JSONL."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        corpus_io.save_corpus(self.docs, directory / "corpus.jsonl")
        if self.base_embeddings is not None:
            corpus_io.save_embeddings(self.base_embeddings, directory / "base.emb")
        if self.adapted_embeddings is not None:
            corpus_io.save_embeddings(self.adapted_embeddings, directory / "adapted.emb")
        if self.adapter is not None:
            save_adapter(self.adapter, directory / "adapter.adp")
        meta = {
            "name": self.name,
            "embed_dim": self.embed_dim,
            "embed_seed": self.embed_seed,
            "revision": self.revision,
            "labels": self.labels,
        }
        (directory / "labels.json").write_text(json.dumps(meta, indent=2), encoding="utf-8")
        with open(directory / "jobs.jsonl", "w", encoding="utf-8") as fh:
            for record in self.jobs:
                fh.write(json.dumps(record.to_dict()) + "\n")

    @classmethod
    def load(cls, directory: str | Path) -> "Project":
        directory = Path(directory)
        meta = json.loads((directory / "labels.json").read_text(encoding="utf-8"))
        project = cls(meta["name"], embed_dim=meta["embed_dim"], embed_seed=meta["embed_seed"])
        docs = corpus_io.load_corpus(directory / "corpus.jsonl")
        project.docs = docs
        project.id_to_row = {doc.id: i for i, doc in enumerate(docs)}
        project.base_embeddings = corpus_io.load_embeddings(directory / "base.emb")
        if (directory / "adapted.emb").exists():
            project.adapted_embeddings = corpus_io.load_embeddings(directory / "adapted.emb")
        if (directory / "adapter.adp").exists():
            project.adapter = load_adapter(directory / "adapter.adp")
        project.labels = dict(meta["labels"])
        project.revision = int(meta["revision"])
        if (directory / "jobs.jsonl").exists():
            with open(directory / "jobs.jsonl", "r", encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        data = json.loads(line)
                        project.jobs.append(JobRecord(**data))
        return project
