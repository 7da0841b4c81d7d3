import type {
  EdgeDetail,
  EdgeImage,
  GraphDocument,
  SortKey,
  SubjectDetail,
  SubjectImage,
} from "./types";

export interface Api {
  graph(): Promise<GraphDocument>;
  subject(id: number): Promise<SubjectDetail>;
  subjectImages(id: number, sortBy: SortKey, order: "asc" | "desc"): Promise<SubjectImage[]>;
  edge(i: number, j: number): Promise<EdgeDetail>;
  edgeImages(i: number, j: number): Promise<EdgeImage[]>;
  imageUrl(imageId: number): string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

/** fetch-backed client; identical in-flight requests are deduplicated. */
export class HttpApi implements Api {
  private pending = new Map<string, Promise<unknown>>();

  constructor(private base = "") {}

  private getJson<T>(path: string): Promise<T> {
    const url = this.base + path;
    const inflight = this.pending.get(url);
    if (inflight) return inflight as Promise<T>;
    const promise = fetch(url)
      .then(async (response) => {
        if (!response.ok) {
          throw new ApiError(response.status, `${url} -> ${response.status}`);
        }
        return (await response.json()) as T;
      })
      .finally(() => this.pending.delete(url));
    this.pending.set(url, promise);
    return promise;
  }

  graph(): Promise<GraphDocument> {
    return this.getJson("/api/graph");
  }

  subject(id: number): Promise<SubjectDetail> {
    return this.getJson(`/api/subjects/${id}`);
  }

  subjectImages(id: number, sortBy: SortKey, order: "asc" | "desc"): Promise<SubjectImage[]> {
    return this.getJson(`/api/subjects/${id}/images?sort_by=${sortBy}&order=${order}`);
  }

  edge(i: number, j: number): Promise<EdgeDetail> {
    return this.getJson(`/api/edges/${i}/${j}`);
  }

  edgeImages(i: number, j: number): Promise<EdgeImage[]> {
    return this.getJson(`/api/edges/${i}/${j}/images`);
  }

  imageUrl(imageId: number): string {
    return `${this.base}/api/images/${imageId}`;
  }
}
