import { EXPRESSION_LABELS, type SortKey } from "./types";

export type Selection =
  | { kind: "none" }
  | { kind: "node"; id: number }
  | { kind: "edge"; i: number; j: number };

export interface ViewState {
  selection: Selection;
  sortBy: SortKey;
}

// galleries open sorted by happiness
export const DEFAULT_SORT: SortKey = "happy";

export function defaultState(): ViewState {
  return { selection: { kind: "none" }, sortBy: DEFAULT_SORT };
}

function isSortKey(value: string): value is SortKey {
  return value === "none" || (EXPRESSION_LABELS as readonly string[]).includes(value);
}

/** Serialize to a URL fragment, e.g. "#node=3&sort=happy" or "#edge=0-2". */
export function serializeState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.selection.kind === "node") {
    params.set("node", String(state.selection.id));
  } else if (state.selection.kind === "edge") {
    params.set("edge", `${state.selection.i}-${state.selection.j}`);
  }
  if (state.sortBy !== DEFAULT_SORT) {
    params.set("sort", state.sortBy);
  }
  const qs = params.toString();
  return qs ? `#${qs}` : "";
}

export function parseState(hash: string): ViewState {
  const state = defaultState();
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  if (!raw) return state;
  const params = new URLSearchParams(raw);

  const sort = params.get("sort");
  if (sort !== null && isSortKey(sort)) {
    state.sortBy = sort;
  }
  const node = params.get("node");
  if (node !== null && /^\d+$/.test(node)) {
    state.selection = { kind: "node", id: Number(node) };
    return state;
  }
  const edge = params.get("edge");
  if (edge !== null && /^\d+-\d+$/.test(edge)) {
    const [a, b] = edge.split("-").map(Number) as [number, number];
    if (a !== b) {
      state.selection = { kind: "edge", i: Math.min(a, b), j: Math.max(a, b) };
    }
  }
  return state;
}

export function pushStateToUrl(state: ViewState): void {
  const hash = serializeState(state);
  const url = window.location.pathname + window.location.search + hash;
  window.history.replaceState(null, "", url);
}
