import { Classification, ModelCard } from "./types.js";

export interface SuggestionCard {
  cluster: number;
  weight: number;
  /** 91-char wire grid of the cluster's representative room, when known. */
  thumbnail: string | null;
}

export interface ArchetypeProgress {
  name: string;
  matched: number;
  total: number;
  /** 0..1 for a progress bar. */
  fraction: number;
}

export interface PanelModel {
  cluster: number | null;
  breadcrumb: number[];
  archetypes: ArchetypeProgress[];
  suggestions: SuggestionCard[];
  /** Shown when the classifier has no predictions for the current path. */
  notice: string | null;
  stale: boolean;
}

export const EXPLORING_NOTICE = "exploring new territory";

/** View-model for the suggestion panel: current cluster, archetype progress
 * bars, and the top-3 predicted next clusters with template thumbnails. */
export function buildPanelModel(
  classification: Classification | null,
  model: ModelCard | null,
  stale = false,
): PanelModel {
  if (!classification) {
    return { cluster: null, breadcrumb: [], archetypes: [], suggestions: [],
             notice: null, stale };
  }
  const thumbnails = new Map<number, string>();
  for (const cluster of model?.clusters ?? []) {
    thumbnails.set(cluster.id, cluster.exemplar_grid);
  }
  const archetypes = classification.matched_archetypes.map((m) => ({
    name: m.archetype,
    matched: m.matched_length,
    total: m.items.length,
    fraction: m.items.length > 0 ? m.matched_length / m.items.length : 0,
  }));
  const suggestions = [...classification.predicted_next]
    .sort((a, b) => b.weight - a.weight || a.cluster - b.cluster)
    .slice(0, 3)
    .map((p) => ({
      cluster: p.cluster,
      weight: p.weight,
      thumbnail: thumbnails.get(p.cluster) ?? null,
    }));
  return {
    cluster: classification.cluster,
    breadcrumb: [...classification.path],
    archetypes,
    suggestions,
    notice: suggestions.length === 0 ? EXPLORING_NOTICE : null,
    stale,
  };
}
