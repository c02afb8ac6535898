import { describe, expect, it } from "vitest";

import { buildPanelModel, EXPLORING_NOTICE } from "../src/panel.js";
import { Classification, ModelCard } from "../src/types.js";

function classification(overrides: Partial<Classification> = {}): Classification {
  return {
    session_id: "s",
    step_index: 3,
    cluster: 8,
    path: [0, 8],
    matched_archetypes: [
      { archetype: "archetype-1", items: [0, 8, 3, 7], matched_length: 2 },
      { archetype: "archetype-4", items: [8, 3, 6], matched_length: 1 },
    ],
    predicted_next: [
      { cluster: 6, weight: 45 },
      { cluster: 3, weight: 78 },
      { cluster: 9, weight: 5 },
      { cluster: 2, weight: 1 },
    ],
    ...overrides,
  };
}

function model(): ModelCard {
  return {
    algorithm: "kmeans",
    encoder: "tiles",
    n_clusters: 12,
    n_rows: 100,
    clusters: [
      { id: 3, size: 10, centroid: [0, 0], exemplar_grid: "F".repeat(91) },
      { id: 6, size: 12, centroid: [1, 1], exemplar_grid: "W".repeat(91) },
    ],
    personas: [],
  };
}

describe("suggestion panel view-model", () => {
  it("orders the top-3 suggestions by weight with thumbnails", () => {
    const view = buildPanelModel(classification(), model());
    expect(view.cluster).toBe(8);
    expect(view.suggestions.map((s) => s.cluster)).toEqual([3, 6, 9]);
    expect(view.suggestions[0].thumbnail).toBe("F".repeat(91));
    expect(view.suggestions[1].thumbnail).toBe("W".repeat(91));
    expect(view.suggestions[2].thumbnail).toBeNull(); // not in the model card
    expect(view.notice).toBeNull();
  });

  it("reports archetype progress fractions", () => {
    const view = buildPanelModel(classification(), model());
    expect(view.archetypes).toEqual([
      { name: "archetype-1", matched: 2, total: 4, fraction: 0.5 },
      { name: "archetype-4", matched: 1, total: 3, fraction: 1 / 3 },
    ]);
  });

  it("shows the exploring notice when there are no predictions", () => {
    const view = buildPanelModel(classification({ predicted_next: [] }), model());
    expect(view.suggestions).toEqual([]);
    expect(view.notice).toBe(EXPLORING_NOTICE);
  });

  it("handles the pre-classification state and staleness", () => {
    expect(buildPanelModel(null, null).cluster).toBeNull();
    expect(buildPanelModel(classification(), null, true).stale).toBe(true);
  });

  it("mirrors the server path in the breadcrumb", () => {
    const view = buildPanelModel(classification(), model());
    expect(view.breadcrumb).toEqual([0, 8]);
  });
});
