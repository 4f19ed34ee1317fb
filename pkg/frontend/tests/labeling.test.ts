import { describe, expect, it, vi } from "vitest";

import { ServiceClient } from "../src/api.js";
import { applyLabelToCard, createBulkLabelForm, validateLabel } from "../src/labeling.js";
import { renderClusterCard } from "../src/board.js";
import { fakeFetch, makeFixtureProject } from "./fake_service.js";

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

describe("validateLabel", () => {
  it("trims and accepts real labels", () => {
    expect(validateLabel("  billing ")).toBe("billing");
  });

  it("rejects empty and whitespace-only labels", () => {
    expect(validateLabel("")).toBeNull();
    expect(validateLabel("   ")).toBeNull();
    expect(validateLabel("\t\n")).toBeNull();
  });
});

describe("createBulkLabelForm", () => {
  it("round-trips: confirmed write updates the badge and the service label store", async () => {
    const project = makeFixtureProject();
    const fetchSpy = vi.fn(fakeFetch(project));
    const client = new ServiceClient("http://svc", fetchSpy);
    const summaries = await client.clusters("p0");
    const card = renderClusterCard(summaries[0]);

    const { form, input } = createBulkLabelForm(client, "p0", 0, (label) => {
      applyLabelToCard(card, label);
    });
    input.value = " billing ";
    form.dispatchEvent(new Event("submit"));
    await flush();

    // service-side store got every member of cluster 0, revision bumped once
    expect(project.labels.get("d0")).toBe("billing");
    expect(project.labels.get("d4")).toBe("billing");
    expect(project.labels.size).toBe(5);
    expect(project.revision).toBe(1);
    // badge reflects the confirmed label
    expect(card.querySelector(".label-badge")!.textContent).toBe("billing");
    // and the board payload now carries it for the next refetch
    const refetched = await client.clusters("p0");
    expect(refetched[0].label).toBe("billing");
  });

  it("whitespace-only label fails client-side with no request", async () => {
    const project = makeFixtureProject();
    const fetchSpy = vi.fn(fakeFetch(project));
    const client = new ServiceClient("http://svc", fetchSpy);
    const onLabeled = vi.fn();
    const { form, input, error } = createBulkLabelForm(client, "p0", 0, onLabeled);
    input.value = "   ";
    form.dispatchEvent(new Event("submit"));
    await flush();

    expect(fetchSpy).not.toHaveBeenCalled();
    expect(onLabeled).not.toHaveBeenCalled();
    expect(error.hidden).toBe(false);
    expect(project.revision).toBe(0);
  });

  it("service errors surface inline and change no local state", async () => {
    const project = makeFixtureProject();
    const client = new ServiceClient("http://svc", fakeFetch(project));
    const onLabeled = vi.fn();
    const { form, input, error } = createBulkLabelForm(client, "p0", 99, onLabeled);
    input.value = "billing";
    form.dispatchEvent(new Event("submit"));
    await flush();

    expect(onLabeled).not.toHaveBeenCalled();
    expect(error.hidden).toBe(false);
    expect(error.textContent).toContain("unknown cluster");
    expect(project.labels.size).toBe(0);
  });

  it("relabeling replaces the badge", async () => {
    const project = makeFixtureProject();
    const client = new ServiceClient("http://svc", fakeFetch(project));
    const summaries = await client.clusters("p0");
    const card = renderClusterCard(summaries[0]);
    const { form, input } = createBulkLabelForm(client, "p0", 0, (label) =>
      applyLabelToCard(card, label),
    );

    input.value = "billing";
    form.dispatchEvent(new Event("submit"));
    await flush();
    input.value = "refunds";
    form.dispatchEvent(new Event("submit"));
    await flush();

    expect(card.querySelectorAll(".label-badge")).toHaveLength(1);
    expect(card.querySelector(".label-badge")!.textContent).toBe("refunds");
    expect(project.labels.get("d0")).toBe("refunds");
    expect(project.revision).toBe(2);
  });
});
