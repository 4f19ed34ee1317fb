// In-memory stand-in for the clustering service, implementing the JSON
// contracts of the endpoints the UI uses. Keeps a real label store with a
// revision counter so round-trip tests can assert on service-side state.

import type { ClusterSummary, JobStatus } from "../src/types.js";
import type { FetchLike } from "../src/api.js";

export interface FakeProject {
  docsByCluster: Map<number, string[]>;
  summaries: ClusterSummary[];
  labels: Map<string, string>;
  revision: number;
  nDocs: number;
  threshold: number;
  adapterPresent: boolean;
  jobs: JobStatus[];
  jobDelayPolls: number;
}

export function makeFixtureProject(): FakeProject {
  const docsByCluster = new Map<number, string[]>([
    [0, ["d0", "d1", "d2", "d3", "d4"]],
    [1, ["d5", "d6", "d7"]],
    [2, ["d8", "d9"]],
  ]);
  const summaries: ClusterSummary[] = [
    {
      cluster_id: 0,
      size: 5,
      top_bigrams: [
        ["world cup", 9],
        ["cup final", 7],
        ["first round", 4],
        ["davis cup", 3],
        ["grand prix", 2],
      ],
      label: null,
    },
    {
      cluster_id: 1,
      size: 3,
      top_bigrams: [
        ["press digest", 5],
        ["verified stories", 2],
      ],
      label: null,
    },
    {
      cluster_id: 2,
      size: 2,
      top_bigrams: [["radio romania", 2]],
      label: null,
    },
  ];
  return {
    docsByCluster,
    summaries,
    labels: new Map(),
    revision: 0,
    nDocs: 10,
    threshold: 0.025,
    adapterPresent: false,
    jobs: [],
    jobDelayPolls: 0,
  };
}

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function clusterLabel(project: FakeProject, clusterId: number): string | null {
  const ids = project.docsByCluster.get(clusterId) ?? [];
  const labels = new Set(ids.map((id) => project.labels.get(id) ?? null));
  return labels.size === 1 ? (labels.values().next().value ?? null) : null;
}

/** A fetch() replacement wired to an in-memory project keyed as "p0". */
export function fakeFetch(project: FakeProject): FetchLike {
  let pollCountdown = 0;
  return async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body ? JSON.parse(String(init.body)) : {};

    if (method === "GET" && path === "/projects/p0") {
      return json({
        name: "fixture",
        n_docs: project.nDocs,
        labeled_count: project.labels.size,
        labeled_fraction: project.labels.size / project.nDocs,
        labeled_fraction_threshold: project.threshold,
        revision: project.revision,
        adapter_present: project.adapterPresent,
        has_partition: project.summaries.length > 0,
        n_clusters: project.summaries.length,
        n_jobs: project.jobs.length,
      });
    }

    if (method === "GET" && /^\/projects\/p0\/clusters\?/.test(path)) {
      const top = Number(new URLSearchParams(path.split("?")[1]).get("top_bigrams") ?? 5);
      return json(
        project.summaries.map((s) => ({
          ...s,
          top_bigrams: s.top_bigrams.slice(0, top),
          label: clusterLabel(project, s.cluster_id),
        })),
      );
    }

    if (method === "POST" && path === "/projects/p0/labels") {
      const label = body.label as string;
      if (!label || !label.trim()) {
        return json({ detail: "label must be non-empty" }, 400);
      }
      let ids: string[];
      if (body.cluster_id !== undefined && body.cluster_id !== null) {
        const members = project.docsByCluster.get(body.cluster_id);
        if (!members) return json({ detail: `unknown cluster ${body.cluster_id}` }, 400);
        ids = members;
      } else {
        ids = body.doc_ids ?? [];
      }
      for (const id of ids) project.labels.set(id, label);
      project.revision += 1;
      return json({ labeled_count: ids.length, revision: project.revision });
    }

    if (method === "POST" && path === "/projects/p0/jobs") {
      if (body.mode === "fixed_k" && (!body.k || body.k < 1)) {
        return json({ detail: "fixed_k requires k >= 1" }, 400);
      }
      const job: JobStatus = {
        status: "queued",
        timings: {},
        partition_digest: null,
        n_clusters: null,
        error: null,
      };
      project.jobs.push(job);
      pollCountdown = project.jobDelayPolls;
      return json({ job_id: project.jobs.length - 1 });
    }

    const jobMatch = path.match(/^\/projects\/p0\/jobs\/(\d+)$/);
    if (method === "GET" && jobMatch) {
      const job = project.jobs[Number(jobMatch[1])];
      if (!job) return json({ detail: "unknown job" }, 404);
      if (job.status !== "done") {
        if (pollCountdown > 0) {
          pollCountdown -= 1;
          job.status = "running";
        } else {
          job.status = "done";
          job.n_clusters = project.summaries.length;
          job.partition_digest = "digest";
          job.timings = { knn_ms: 1, cluster_ms: 1, total_ms: 2 };
        }
      }
      return json(job);
    }

    if (method === "POST" && /^\/projects\/p0\/clusters\/\d+\/subcluster$/.test(path)) {
      const job: JobStatus = {
        status: "done",
        timings: { total_ms: 1 },
        partition_digest: "child",
        n_clusters: 2,
        error: null,
      };
      project.jobs.push(job);
      return json({ job_id: project.jobs.length - 1 });
    }

    if (method === "POST" && path === "/projects/p0/adapt") {
      if (project.labels.size / project.nDocs < project.threshold) {
        return json({ detail: "below threshold" }, 400);
      }
      project.adapterPresent = true;
      return json({ adapter_stats: { trained_on: project.labels.size } });
    }

    return json({ detail: `unhandled ${method} ${path}` }, 404);
  };
}
