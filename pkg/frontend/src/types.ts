// Payload shapes mirrored from the service API. The UI never derives these
// numbers itself; anything rendered comes straight from a response body.

export interface ClusterSummary {
  cluster_id: number;
  size: number;
  top_bigrams: [string, number][];
  label?: string | null;
  children?: ClusterSummary[];
}

export interface ProjectStatus {
  name: string;
  n_docs: number;
  labeled_count: number;
  labeled_fraction: number;
  labeled_fraction_threshold: number;
  revision: number;
  adapter_present: boolean;
  has_partition: boolean;
  n_clusters: number | null;
  n_jobs: number;
}

export interface JobStatus {
  status: "queued" | "running" | "done" | "failed";
  timings: Record<string, number>;
  partition_digest: string | null;
  n_clusters: number | null;
  error: string | null;
}

export interface LabelResponse {
  labeled_count: number;
  revision: number;
}

export interface MemberDoc {
  id: string;
  text: string;
  label: string | null;
}

export interface DocsPage {
  total: number;
  offset: number;
  docs: MemberDoc[];
}

export type JobMode = "auto" | "fixed_k";

export interface JobRequest {
  mode: JobMode;
  k?: number;
  knn_k?: number;
  seed?: number;
  scope?: string[];
}
