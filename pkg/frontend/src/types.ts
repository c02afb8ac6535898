export const GRID_WIDTH = 13;
export const GRID_HEIGHT = 7;
export const GRID_CELLS = GRID_WIDTH * GRID_HEIGHT;

export type TileChar = "F" | "W" | "E" | "B" | "T" | "D";

export const TILE_CHARS: readonly TileChar[] = ["F", "W", "E", "B", "T", "D"];

export const TILE_NAMES: Record<TileChar, string> = {
  F: "floor",
  W: "wall",
  E: "enemy",
  B: "boss",
  T: "treasure",
  D: "door",
};

export interface MatchedArchetype {
  archetype: string;
  items: number[];
  matched_length: number;
}

export interface Prediction {
  cluster: number;
  weight: number;
}

export interface Classification {
  session_id: string;
  step_index: number;
  cluster: number;
  path: number[];
  matched_archetypes: MatchedArchetype[];
  predicted_next: Prediction[];
}

export interface ClusterCard {
  id: number;
  size: number;
  centroid: number[];
  exemplar_grid: string;
}

export interface ModelCard {
  algorithm: string;
  encoder: string;
  n_clusters: number;
  n_rows: number;
  clusters: ClusterCard[];
  personas: { name: string; items: number[]; support: number }[];
}
