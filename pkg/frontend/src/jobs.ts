import { ServiceClient, waitForJob } from "./api.js";
import type { JobMode, JobRequest, JobStatus } from "./types.js";

/** fixed_k needs a positive integer k; auto ignores k entirely. */
export function validateJobForm(mode: JobMode, kRaw: string): JobRequest | null {
  if (mode === "auto") return { mode };
  if (!/^\d+$/.test(kRaw.trim())) return null;
  const k = Number(kRaw.trim());
  if (k < 1) return null;
  return { mode, k };
}

export interface JobFormElements {
  form: HTMLFormElement;
  modeSelect: HTMLSelectElement;
  kInput: HTMLInputElement;
  submit: HTMLButtonElement;
  status: HTMLElement;
}

/** Job launcher: mode selector, k input (enabled only for fixed_k), submit
 * disabled while the form is invalid. Polls status and hands the terminal
 * status to `onFinished`, after which the caller refetches the board. */
export function createJobForm(
  client: ServiceClient,
  projectId: string,
  onFinished: (status: JobStatus) => void,
): JobFormElements {
  const form = document.createElement("form");
  form.className = "job-form";
  const modeSelect = document.createElement("select");
  for (const mode of ["auto", "fixed_k"]) {
    const option = document.createElement("option");
    option.value = mode;
    option.textContent = mode === "auto" ? "auto (detect cluster count)" : "fixed k";
    modeSelect.appendChild(option);
  }
  const kInput = document.createElement("input");
  kInput.type = "number";
  kInput.name = "k";
  kInput.min = "1";
  kInput.placeholder = "k";
  kInput.disabled = true;
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Run clustering";
  const status = document.createElement("p");
  status.className = "job-status";
  form.append(modeSelect, kInput, submit, status);

  const refresh = () => {
    const mode = modeSelect.value as JobMode;
    kInput.disabled = mode !== "fixed_k";
    submit.disabled = validateJobForm(mode, kInput.value) === null;
  };
  modeSelect.addEventListener("change", refresh);
  kInput.addEventListener("input", refresh);
  refresh();

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const request = validateJobForm(modeSelect.value as JobMode, kInput.value);
    if (!request) return;
    submit.disabled = true;
    status.textContent = "running…";
    try {
      const { job_id } = await client.startJob(projectId, request);
      const final = await waitForJob(client, projectId, job_id);
      status.textContent =
        final.status === "done"
          ? `done: ${final.n_clusters} clusters`
          : `failed: ${final.error ?? "unknown error"}`;
      onFinished(final);
    } catch (err) {
      status.textContent = `failed: ${(err as Error).message}`;
    } finally {
      refresh();
    }
  });
  return { form, modeSelect, kInput, submit, status };
}

/** Sub-cluster launch for one card; disabled with a tooltip on singletons. */
export function createSubclusterButton(
  client: ServiceClient,
  projectId: string,
  clusterId: number,
  clusterSize: number,
  onFinished: (status: JobStatus) => void,
): HTMLButtonElement {
  const button = document.createElement("button");
  button.type = "button";
  button.className = "subcluster-action";
  button.textContent = "Sub-cluster";
  if (clusterSize < 2) {
    button.disabled = true;
    button.title = "nothing to sub-cluster";
    return button;
  }
  button.addEventListener("click", async () => {
    button.disabled = true;
    try {
      const { job_id } = await client.subcluster(projectId, clusterId, { mode: "auto" });
      onFinished(await waitForJob(client, projectId, job_id));
    } catch (err) {
      button.title = (err as Error).message;
    } finally {
      button.disabled = false;
    }
  });
  return button;
}
