import type { Api } from "../src/api";
import type {
  EdgeDetail,
  EdgeImage,
  GraphDocument,
  GraphNode,
  SortKey,
  SubjectDetail,
  SubjectImage,
} from "../src/types";
import graphFixture from "./fixtures/graph.json";

export const fixtureDocument = graphFixture as unknown as GraphDocument;

export interface CallLog {
  graph: number;
  subject: number[];
  subjectImages: { id: number; sortBy: SortKey; order: string }[];
  edge: [number, number][];
  edgeImages: [number, number][];
}

/** Api fake backed by the checked-in graph.json produced by the backend. */
export class FakeApi implements Api {
  calls: CallLog = { graph: 0, subject: [], subjectImages: [], edge: [], edgeImages: [] };

  constructor(private doc: GraphDocument = fixtureDocument) {}

  private node(id: number): GraphNode {
    const node = this.doc.nodes.find((n) => n.subject_id === id);
    if (!node) {
      const error = new Error(`404 subject ${id}`) as Error & { status: number };
      error.status = 404;
      throw error;
    }
    return node;
  }

  async graph(): Promise<GraphDocument> {
    this.calls.graph += 1;
    return this.doc;
  }

  async subject(id: number): Promise<SubjectDetail> {
    this.calls.subject.push(id);
    const node = this.node(id);
    return {
      subject_id: id,
      name: node.name,
      image_count: node.image_count,
      gender: node.gender,
      mean_age: node.mean_age,
      expression_stats: node.expression_stats,
      neighbors: this.doc.edges
        .filter((e) => e.i === id || e.j === id)
        .map((e) => ({
          subject_id: e.i === id ? e.j : e.i,
          t: e.breakdown["T"] ?? 0,
          co_image_count: e.co_image_count,
        })),
    };
  }

  async subjectImages(id: number, sortBy: SortKey, order: "asc" | "desc"): Promise<SubjectImage[]> {
    this.calls.subjectImages.push({ id, sortBy, order });
    this.node(id);
    // a deliberately non-monotonic image_id order: the UI must not re-sort
    const ids = [41, 7, 19, 3];
    return ids.map((imageId, rank) => ({
      image_id: imageId,
      face_id: imageId * 10 + id,
      score: sortBy === "none" ? null : 0.9 - rank * 0.2,
      bbox: [10, 10, 60, 60],
    }));
  }

  async edge(i: number, j: number): Promise<EdgeDetail> {
    this.calls.edge.push([i, j]);
    const edge = this.doc.edges.find((e) => e.i === i && e.j === j);
    if (!edge) {
      return {
        i,
        j,
        breakdown: { C: 0, D: 0, Z: 0, E: 0, H: 0, T: 0 },
        color: null,
        width: 0,
        image_ids: [],
      };
    }
    return {
      i: edge.i,
      j: edge.j,
      breakdown: edge.breakdown,
      color: edge.color,
      width: edge.width,
      image_ids: edge.image_ids,
    };
  }

  async edgeImages(i: number, j: number): Promise<EdgeImage[]> {
    this.calls.edgeImages.push([i, j]);
    const edge = this.doc.edges.find((e) => e.i === i && e.j === j);
    if (!edge) return [];
    return edge.image_ids.map((imageId) => ({
      image_id: imageId,
      bbox_i: [0, 0, 50, 50],
      bbox_j: [60, 0, 110, 50],
    }));
  }

  imageUrl(imageId: number): string {
    return `/api/images/${imageId}`;
  }
}

export function mount(): HTMLElement {
  document.body.innerHTML = "";
  window.location.hash = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}

export async function flush(): Promise<void> {
  // drain the microtask queue a few times so chained awaits settle
  for (let k = 0; k < 10; k += 1) {
    await Promise.resolve();
  }
}
