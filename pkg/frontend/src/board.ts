import type { ClusterSummary } from "./types.js";

export interface BoardHandlers {
  onSelect?: (clusterId: number) => void;
  onRunJob?: () => void;
}

function bigramList(summary: ClusterSummary): HTMLUListElement {
  const list = document.createElement("ul");
  list.className = "bigrams";
  for (const [bigram, count] of summary.top_bigrams) {
    const item = document.createElement("li");
    // verbatim from the payload; the client never re-tokenizes
    const term = document.createElement("span");
    term.className = "bigram-text";
    term.textContent = bigram;
    const freq = document.createElement("span");
    freq.className = "bigram-count";
    freq.textContent = String(count);
    item.append(term, freq);
    list.appendChild(item);
  }
  return list;
}

export function renderClusterCard(
  summary: ClusterSummary,
  handlers: BoardHandlers = {},
  nested = false,
): HTMLElement {
  const card = document.createElement("article");
  card.className = nested ? "cluster-card nested" : "cluster-card";
  card.dataset.clusterId = String(summary.cluster_id);

  const header = document.createElement("header");
  const title = document.createElement("h3");
  title.textContent = `Cluster ${summary.cluster_id}`;
  const size = document.createElement("span");
  size.className = "cluster-size";
  size.textContent = `${summary.size} docs`;
  header.append(title, size);

  if (summary.label) {
    const badge = document.createElement("span");
    badge.className = "label-badge";
    badge.textContent = summary.label;
    header.appendChild(badge);
  }
  card.appendChild(header);
  card.appendChild(bigramList(summary));

  if (summary.children && summary.children.length) {
    const childBoard = document.createElement("div");
    childBoard.className = "subcluster-board";
    for (const child of sortBySize(summary.children)) {
      childBoard.appendChild(renderClusterCard(child, handlers, true));
    }
    card.appendChild(childBoard);
  }

  card.addEventListener("click", (event) => {
    event.stopPropagation();
    card.classList.toggle("selected");
    handlers.onSelect?.(summary.cluster_id);
  });
  return card;
}

function sortBySize(summaries: ClusterSummary[]): ClusterSummary[] {
  return [...summaries].sort(
    (a, b) => b.size - a.size || a.cluster_id - b.cluster_id,
  );
}

/** Card grid ordered by size descending; empty input renders the empty-state
 * panel with a "run a clustering job" action. */
export function renderClusterBoard(
  summaries: ClusterSummary[],
  handlers: BoardHandlers = {},
): HTMLElement {
  const board = document.createElement("section");
  board.className = "cluster-board";
  if (!summaries.length) {
    const empty = document.createElement("div");
    empty.className = "empty-state";
    const message = document.createElement("p");
    message.textContent = "No clusters yet.";
    const action = document.createElement("button");
    action.type = "button";
    action.className = "run-job-action";
    action.textContent = "Run a clustering job";
    action.addEventListener("click", () => handlers.onRunJob?.());
    empty.append(message, action);
    board.appendChild(empty);
    return board;
  }
  for (const summary of sortBySize(summaries)) {
    board.appendChild(renderClusterCard(summary, handlers));
  }
  return board;
}
