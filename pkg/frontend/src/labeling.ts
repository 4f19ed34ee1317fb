import { ServiceClient } from "./api.js";
import type { LabelResponse } from "./types.js";

export interface LabelFormResult {
  form: HTMLFormElement;
  input: HTMLInputElement;
  submit: HTMLButtonElement;
  error: HTMLElement;
}

/** Trim-validated label value, or null when the input is unusable. */
export function validateLabel(raw: string): string | null {
  const trimmed = raw.trim();
  return trimmed.length ? trimmed : null;
}

/** Bulk-label form for one cluster. Waits for service confirmation before
 * touching any UI state (no optimistic updates); service failures surface as
 * an inline message and change nothing locally. */
export function createBulkLabelForm(
  client: ServiceClient,
  projectId: string,
  clusterId: number,
  onLabeled: (label: string, response: LabelResponse) => void,
): LabelFormResult {
  const form = document.createElement("form");
  form.className = "bulk-label-form";
  const input = document.createElement("input");
  input.type = "text";
  input.name = "label";
  input.placeholder = "intent label";
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Label cluster";
  const error = document.createElement("p");
  error.className = "inline-error";
  error.hidden = true;
  form.append(input, submit, error);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    error.hidden = true;
    const label = validateLabel(input.value);
    if (label === null) {
      error.textContent = "Label must be non-empty.";
      error.hidden = false;
      return; // client-side validation: no request leaves the browser
    }
    submit.disabled = true;
    client
      .bulkLabel(projectId, clusterId, label)
      .then((response) => {
        onLabeled(label, response);
      })
      .catch((err: Error) => {
        error.textContent = err.message;
        error.hidden = false;
      })
      .finally(() => {
        submit.disabled = false;
      });
  });
  return { form, input, submit, error };
}

/** Badge + labeled-fraction indicator update after a confirmed label write. */
export function applyLabelToCard(card: HTMLElement, label: string): void {
  let badge = card.querySelector<HTMLElement>(".label-badge");
  if (!badge) {
    badge = document.createElement("span");
    badge.className = "label-badge";
    card.querySelector("header")?.appendChild(badge);
  }
  badge.textContent = label;
}

export function renderLabeledFraction(
  indicator: HTMLElement,
  labeledCount: number,
  nDocs: number,
  fraction: number,
  threshold: number,
): void {
  indicator.textContent = `${labeledCount} / ${nDocs} labeled (${(fraction * 100).toFixed(1)}%)`;
  indicator.classList.toggle("adapt-ready", fraction >= threshold);
}
