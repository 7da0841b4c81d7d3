// Mirrors the backend's graph.json and /api response shapes.
// The UI does no connectivity or layout math of its own: every number shown
// comes from these payloads verbatim.

export const EXPRESSION_LABELS = [
  "angry",
  "disgust",
  "scared",
  "happy",
  "sad",
  "surprised",
  "neutral",
] as const;

export type ExpressionLabel = (typeof EXPRESSION_LABELS)[number];
export type SortKey = ExpressionLabel | "none";

export interface ColorRef {
  name: string;
  hex: string;
}

export interface ExpressionStats {
  histogram: number[];
  predominant: string;
  happiness_share: number;
  empty: boolean;
}

export interface GraphNode {
  subject_id: number;
  name: string;
  position: [number, number];
  image_count: number;
  radius: number;
  border_color: ColorRef;
  expression_stats: ExpressionStats;
  gender: string | null;
  mean_age: number | null;
  thumbnail_face_id: number | null;
}

export interface GraphEdge {
  i: number;
  j: number;
  width: number;
  color: ColorRef;
  co_image_count: number;
  breakdown: Record<string, number>;
  image_ids: number[];
}

export interface GraphDocument {
  metadata: Record<string, unknown>;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface NeighborRef {
  subject_id: number;
  t: number;
  co_image_count: number;
}

export interface SubjectDetail {
  subject_id: number;
  name: string;
  image_count: number;
  gender: string | null;
  mean_age: number | null;
  expression_stats: ExpressionStats;
  neighbors: NeighborRef[];
}

export interface SubjectImage {
  image_id: number;
  face_id: number;
  score: number | null;
  bbox: [number, number, number, number] | null;
}

export interface EdgeDetail {
  i: number;
  j: number;
  breakdown: Record<string, number>;
  color: ColorRef | null;
  width: number;
  image_ids: number[];
}

export interface EdgeImage {
  image_id: number;
  bbox_i: [number, number, number, number] | null;
  bbox_j: [number, number, number, number] | null;
}
