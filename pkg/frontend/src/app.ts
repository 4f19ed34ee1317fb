import { ServiceClient, waitForJob } from "./api.js";
import { renderClusterBoard } from "./board.js";
import { createJobForm, createSubclusterButton } from "./jobs.js";
import { applyLabelToCard, createBulkLabelForm, renderLabeledFraction } from "./labeling.js";
import type { ClusterSummary, ProjectStatus } from "./types.js";

export interface AppConfig {
  apiBase: string;
  projectId: string;
}

/** Wires the analyst loop onto a host element: job controls, cluster board
 * with label forms and sub-cluster actions, labeled-fraction indicator, and
 * an adapt-and-recluster button gated on the service-reported threshold. */
export class ClusterExplorer {
  readonly client: ServiceClient;
  private board: HTMLElement | null = null;

  constructor(
    private host: HTMLElement,
    private config: AppConfig,
    client?: ServiceClient,
  ) {
    this.client = client ?? new ServiceClient(config.apiBase);
  }

  async init(): Promise<void> {
    this.host.replaceChildren();

    const toolbar = document.createElement("div");
    toolbar.className = "toolbar";
    const jobForm = createJobForm(this.client, this.config.projectId, () => {
      void this.refresh();
    });
    toolbar.appendChild(jobForm.form);

    const indicator = document.createElement("span");
    indicator.className = "labeled-fraction";
    toolbar.appendChild(indicator);

    const adaptButton = document.createElement("button");
    adaptButton.type = "button";
    adaptButton.className = "adapt-action";
    adaptButton.textContent = "Adapt & re-cluster";
    adaptButton.disabled = true;
    adaptButton.addEventListener("click", async () => {
      adaptButton.disabled = true;
      try {
        await this.client.adapt(this.config.projectId);
        const { job_id } = await this.client.startJob(this.config.projectId, { mode: "auto" });
        await waitForJob(this.client, this.config.projectId, job_id);
        await this.refresh();
      } finally {
        adaptButton.disabled = false;
      }
    });
    toolbar.appendChild(adaptButton);
    this.host.appendChild(toolbar);

    this.board = document.createElement("div");
    this.board.className = "board-host";
    this.host.appendChild(this.board);
    await this.refresh();
  }

  async refresh(): Promise<void> {
    const status = await this.client.projectStatus(this.config.projectId);
    this.updateToolbar(status);
    const summaries = status.has_partition
      ? await this.client.clusters(this.config.projectId)
      : [];
    this.renderBoard(summaries);
  }

  private updateToolbar(status: ProjectStatus): void {
    const indicator = this.host.querySelector<HTMLElement>(".labeled-fraction");
    if (indicator) {
      renderLabeledFraction(
        indicator,
        status.labeled_count,
        status.n_docs,
        status.labeled_fraction,
        status.labeled_fraction_threshold,
      );
    }
    const adapt = this.host.querySelector<HTMLButtonElement>(".adapt-action");
    if (adapt) {
      // surfacing the labeled-sample rule: enabled only past the threshold
      adapt.disabled = status.labeled_fraction < status.labeled_fraction_threshold;
      adapt.title = adapt.disabled
        ? `label at least ${(status.labeled_fraction_threshold * 100).toFixed(1)}% to adapt`
        : "retrain the adapter on current labels, then re-cluster";
    }
  }

  private renderBoard(summaries: ClusterSummary[]): void {
    if (!this.board) return;
    const board = renderClusterBoard(summaries, {
      onRunJob: () => {
        this.host.querySelector<HTMLElement>(".job-form")?.scrollIntoView?.();
      },
    });
    for (const summary of summaries) {
      const card = board.querySelector<HTMLElement>(
        `[data-cluster-id="${summary.cluster_id}"]`,
      );
      if (!card) continue;
      const controls = document.createElement("footer");
      const labelForm = createBulkLabelForm(
        this.client,
        this.config.projectId,
        summary.cluster_id,
        (label) => {
          applyLabelToCard(card, label);
          void this.client.projectStatus(this.config.projectId).then((s) => this.updateToolbar(s));
        },
      );
      controls.appendChild(labelForm.form);
      controls.appendChild(
        createSubclusterButton(
          this.client,
          this.config.projectId,
          summary.cluster_id,
          summary.size,
          () => void this.refresh(),
        ),
      );
      card.appendChild(controls);
    }
    this.board.replaceChildren(board);
  }
}

declare global {
  interface Window {
    INTENTCLUSTER_CONFIG?: AppConfig;
  }
}

export function mount(): void {
  const host = document.getElementById("app");
  const config = window.INTENTCLUSTER_CONFIG;
  if (host && config) {
    void new ClusterExplorer(host, config).init();
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount();
}
