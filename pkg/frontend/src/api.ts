import type {
  ClusterSummary,
  DocsPage,
  JobRequest,
  JobStatus,
  LabelResponse,
  ProjectStatus,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    detail: string,
  ) {
    super(detail);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the service endpoints. No local math, no caching. */
export class ServiceClient {
  constructor(
    private base: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.base + path, init);
    const body = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      throw new ApiError(resp.status, (body as { detail?: string }).detail ?? resp.statusText);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  createProject(name: string): Promise<{ project_id: string }> {
    return this.post("/projects", { name });
  }

  uploadCorpus(projectId: string, jsonl: string): Promise<{ n_docs: number }> {
    return this.request(`/projects/${projectId}/corpus`, {
      method: "POST",
      headers: { "content-type": "text/plain" },
      body: jsonl,
    });
  }

  projectStatus(projectId: string): Promise<ProjectStatus> {
    return this.request(`/projects/${projectId}`);
  }

  startJob(projectId: string, job: JobRequest): Promise<{ job_id: number }> {
    return this.post(`/projects/${projectId}/jobs`, job);
  }

  jobStatus(projectId: string, jobId: number): Promise<JobStatus> {
    return this.request(`/projects/${projectId}/jobs/${jobId}`);
  }

  clusters(projectId: string, max = 50, topBigrams = 5): Promise<ClusterSummary[]> {
    return this.request(`/projects/${projectId}/clusters?max=${max}&top_bigrams=${topBigrams}`);
  }

  clusterDocs(projectId: string, clusterId: number, offset = 0, limit = 20): Promise<DocsPage> {
    return this.request(
      `/projects/${projectId}/clusters/${clusterId}/docs?offset=${offset}&limit=${limit}`,
    );
  }

  bulkLabel(projectId: string, clusterId: number, label: string): Promise<LabelResponse> {
    return this.post(`/projects/${projectId}/labels`, { cluster_id: clusterId, label });
  }

  subcluster(projectId: string, clusterId: number, job: JobRequest): Promise<{ job_id: number }> {
    return this.post(`/projects/${projectId}/clusters/${clusterId}/subcluster`, job);
  }

  adapt(projectId: string, config: Record<string, unknown> = {}): Promise<unknown> {
    return this.post(`/projects/${projectId}/adapt`, config);
  }

  metrics(projectId: string): Promise<unknown> {
    return this.request(`/projects/${projectId}/metrics`);
  }
}

/** Poll a job until it finishes. Jobs run minutes at most at this scale. */
export async function waitForJob(
  client: ServiceClient,
  projectId: string,
  jobId: number,
  intervalMs = 250,
  timeoutMs = 10 * 60 * 1000,
): Promise<JobStatus> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const status = await client.jobStatus(projectId, jobId);
    if (status.status === "done" || status.status === "failed") return status;
    if (Date.now() > deadline) throw new Error(`job ${jobId} timed out`);
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}
