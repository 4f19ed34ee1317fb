"""HTTP/JSON API over projects: upload a corpus, run clustering jobs, browse
clusters, bulk-label, sub-cluster, retrain the adapter, fetch metrics.

Jobs run on a single worker thread per project, so clustering is serialized
per project while label reads/writes stay responsive.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from pydantic import BaseModel, Field

from .corpus import CorpusFormatError, parse_corpus_text
from .embed import TrainConfig
from .project import ClusterJobRequest, JobResult, Project


class CreateProjectBody(BaseModel):
    name: str


class JobBody(BaseModel):
    mode: str
    k: Optional[int] = None
    knn_k: int = 10
    seed: int = 0
    scope: Optional[list[str]] = None


class LabelBody(BaseModel):
    label: str
    cluster_id: Optional[int] = None
    doc_ids: Optional[list[str]] = None


class AdaptBody(BaseModel):
    projection_dim: Optional[int] = None
    learning_rate: float = 0.5
    epochs: int = 100
    batch_size: int = 32
    seed: int = 0
    labeled_fraction_threshold: float = Field(default=0.025, gt=0, le=1)


class _ProjectState:
    def __init__(self, project: Project):
        self.project = project
        self.executor = ThreadPoolExecutor(max_workers=1)  # one job at a time
        self.results: dict[int, JobResult] = {}

    def submit(self, request: ClusterJobRequest, parent_cluster: Optional[int] = None) -> int:
        record = self.project.new_job_record(request)

        def run() -> None:
            try:
                if parent_cluster is None:
                    result = self.project.run_cluster_job(request, record=record)
                else:
                    result = self.project.subcluster(parent_cluster, request, record=record)
                self.results[record.job_id] = result
            except Exception:
                pass  # failure details live on the job record

        self.executor.submit(run)
        return record.job_id


def create_app() -> FastAPI:
    app = FastAPI(title="intentcluster", version="0.1.0")
    projects: dict[str, _ProjectState] = {}

    def get_state(project_id: str) -> _ProjectState:
        state = projects.get(project_id)
        if state is None:
            raise HTTPException(status_code=404, detail=f"unknown project '{project_id}'")
        return state

    @app.post("/projects")
    def create_project(body: CreateProjectBody) -> dict:
        project_id = f"p{len(projects)}"
        projects[project_id] = _ProjectState(Project(body.name))
        return {"project_id": project_id}

    @app.get("/projects/{project_id}")
    def project_status(project_id: str) -> dict:
        p = get_state(project_id).project
        return {
            "name": p.name,
            "n_docs": p.n_docs,
            "labeled_count": len(p.labels),
            "labeled_fraction": p.labeled_fraction,
            "labeled_fraction_threshold": TrainConfig().labeled_fraction_threshold,
            "revision": p.revision,
            "adapter_present": p.adapter is not None,
            "has_partition": p.partition is not None,
            "n_clusters": p.partition.n_clusters if p.partition else None,
            "n_jobs": len(p.jobs),
        }

    @app.post("/projects/{project_id}/corpus")
    async def upload_corpus(project_id: str, request: Request) -> dict:
        state = get_state(project_id)
        if any(r.status in ("queued", "running") for r in state.project.jobs):
            raise HTTPException(
                status_code=409, detail="a clustering job is in flight; retry when it finishes"
            )
        body = (await request.body()).decode("utf-8")
        try:
            docs = parse_corpus_text(body)
            state.project.set_corpus(docs)
        except (CorpusFormatError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"n_docs": len(docs)}

    def parse_job_body(body: JobBody, scope: Optional[list[str]]) -> ClusterJobRequest:
        try:
            return ClusterJobRequest(
                mode=body.mode, k=body.k, knn_k=body.knn_k, seed=body.seed, scope=scope
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/projects/{project_id}/jobs")
    def create_job(project_id: str, body: JobBody) -> dict:
        state = get_state(project_id)
        if state.project.n_docs == 0:
            raise HTTPException(status_code=400, detail="no corpus uploaded")
        req = parse_job_body(body, body.scope)
        return {"job_id": state.submit(req)}

    @app.get("/projects/{project_id}/jobs/{job_id}")
    def job_status(project_id: str, job_id: int) -> dict:
        project = get_state(project_id).project
        if not (0 <= job_id < len(project.jobs)):
            raise HTTPException(status_code=404, detail=f"unknown job {job_id}")
        record = project.jobs[job_id]
        return {
            "status": record.status,
            "timings": record.timings,
            "partition_digest": record.partition_digest,
            "n_clusters": record.n_clusters,
            "error": record.error,
        }

    @app.get("/projects/{project_id}/clusters")
    def clusters(project_id: str, max: int = 50, top_bigrams: int = 5) -> list[dict]:
        project = get_state(project_id).project
        if project.partition is None:
            return []
        from .summarize import summarize_partition

        summaries = summarize_partition(
            project.docs, project.partition, n_top=top_bigrams, max_clusters=max
        )
        out = []
        for s in summaries:
            item = s.to_dict()
            members = project.partition.members(s.cluster_id)
            labels = {project.labels.get(project.docs[int(r)].id) for r in members}
            item["label"] = labels.pop() if len(labels) == 1 else None
            child = project.subpartitions.get(s.cluster_id)
            if child is not None:
                item["children"] = [c.to_dict() for c in child.summaries]
            out.append(item)
        return out

    @app.get("/projects/{project_id}/clusters/{cluster_id}/docs")
    def cluster_docs(project_id: str, cluster_id: int, offset: int = 0, limit: int = 50) -> dict:
        project = get_state(project_id).project
        if project.partition is None:
            raise HTTPException(status_code=404, detail="no clustering job has run yet")
        if not (0 <= cluster_id < project.partition.n_clusters):
            raise HTTPException(status_code=404, detail=f"unknown cluster {cluster_id}")
        members = project.partition.members(cluster_id)
        page = members[offset : offset + limit]
        docs = [
            {
                "id": project.docs[int(r)].id,
                "text": project.docs[int(r)].text,
                "label": project.labels.get(project.docs[int(r)].id),
            }
            for r in page
        ]
        return {"total": len(members), "offset": offset, "docs": docs}

    @app.post("/projects/{project_id}/labels")
    def post_labels(project_id: str, body: LabelBody) -> dict:
        project = get_state(project_id).project
        try:
            if body.cluster_id is not None:
                count, revision = project.bulk_label(body.cluster_id, body.label)
            elif body.doc_ids is not None:
                count, revision = project.label_docs(body.doc_ids, body.label)
            else:
                raise ValueError("provide cluster_id or doc_ids")
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"labeled_count": count, "revision": revision}

    @app.post("/projects/{project_id}/clusters/{cluster_id}/subcluster")
    def post_subcluster(project_id: str, cluster_id: int, body: JobBody) -> dict:
        state = get_state(project_id)
        req = parse_job_body(body, scope=None)
        return {"job_id": state.submit(req, parent_cluster=cluster_id)}

    @app.post("/projects/{project_id}/adapt")
    def adapt(project_id: str, body: AdaptBody) -> dict:
        project = get_state(project_id).project
        try:
            cfg = TrainConfig(
                projection_dim=body.projection_dim,
                learning_rate=body.learning_rate,
                epochs=body.epochs,
                batch_size=body.batch_size,
                seed=body.seed,
                labeled_fraction_threshold=body.labeled_fraction_threshold,
            )
            adapter = project.retrain_adapter(cfg)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {
            "adapter_stats": {
                "trained_on": adapter.trained_on,
                "in_dim": adapter.in_dim,
                "out_dim": adapter.out_dim,
                "initial_loss": adapter.loss_history[0],
                "final_loss": adapter.loss_history[-1],
            }
        }

    @app.get("/projects/{project_id}/metrics")
    def metrics(project_id: str) -> dict:
        project = get_state(project_id).project
        try:
            report = project.eval_report()
        except ValueError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return report.to_dict()

    return app
