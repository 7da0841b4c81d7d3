import { HttpApi, type Api, ApiError } from "./api";
import { GraphView } from "./graphview";
import { renderEdgePanel, renderError, renderSubjectPanel } from "./panels";
import {
  defaultState,
  parseState,
  pushStateToUrl,
  type Selection,
  type ViewState,
} from "./state";
import type { GraphDocument, SortKey } from "./types";

export class Explorer {
  readonly state: ViewState = defaultState();
  private doc: GraphDocument | null = null;
  private view: GraphView;
  private panel: HTMLElement;
  private status: HTMLElement;
  private requestSeq = 0;

  constructor(
    root: HTMLElement,
    private api: Api,
  ) {
    root.textContent = "";
    root.classList.add("explorer");

    const canvasPane = document.createElement("div");
    canvasPane.className = "canvas-pane";
    this.status = document.createElement("div");
    this.status.className = "status";
    canvasPane.appendChild(this.status);
    this.panel = document.createElement("aside");
    this.panel.className = "panel";
    this.panel.innerHTML = "<p class='hint'>click a node or an edge</p>";
    this.view = new GraphView(canvasPane, {
      onNodeClick: (id) => void this.selectNode(id),
      onEdgeClick: (i, j) => void this.selectEdge(i, j),
    });
    root.appendChild(canvasPane);
    root.appendChild(this.panel);
  }

  /** Fetch the graph, render it, and restore any deep-linked selection. */
  async load(): Promise<void> {
    this.status.textContent = "loading graph…";
    try {
      this.doc = await this.api.graph();
    } catch (error) {
      renderError(this.status, `failed to load graph: ${String(error)}`, () => void this.load());
      return;
    }
    this.status.textContent = "";
    this.view.render(this.doc);

    const fromUrl = parseState(window.location.hash);
    this.state.sortBy = fromUrl.sortBy;
    if (fromUrl.selection.kind === "node") {
      await this.selectNode(fromUrl.selection.id);
    } else if (fromUrl.selection.kind === "edge") {
      await this.selectEdge(fromUrl.selection.i, fromUrl.selection.j);
    }
  }

  get document(): GraphDocument | null {
    return this.doc;
  }

  private apply(selection: Selection): void {
    this.state.selection = selection;
    this.view.setSelection(selection);
    pushStateToUrl(this.state);
  }

  async selectNode(id: number): Promise<void> {
    this.apply({ kind: "node", id });
    const seq = ++this.requestSeq;
    try {
      const [detail, images] = await Promise.all([
        this.api.subject(id),
        this.api.subjectImages(id, this.state.sortBy, "desc"),
      ]);
      if (seq !== this.requestSeq) return; // a newer selection superseded this one
      renderSubjectPanel(this.panel, this.api, detail, images, this.state.sortBy, {
        onSortChange: (sortBy) => void this.changeSort(sortBy),
        onNeighborClick: (neighbor) => void this.selectNode(neighbor),
      });
    } catch (error) {
      if (seq !== this.requestSeq) return;
      const message =
        error instanceof ApiError && error.status === 404
          ? `unknown subject ${id}`
          : `failed to load subject ${id}: ${String(error)}`;
      renderError(this.panel, message, () => void this.selectNode(id));
    }
  }

  async changeSort(sortBy: SortKey): Promise<void> {
    this.state.sortBy = sortBy;
    pushStateToUrl(this.state);
    if (this.state.selection.kind === "node") {
      await this.selectNode(this.state.selection.id);
    }
  }

  async selectEdge(i: number, j: number): Promise<void> {
    const [a, b] = [Math.min(i, j), Math.max(i, j)];
    this.apply({ kind: "edge", i: a, j: b });
    const seq = ++this.requestSeq;
    try {
      const [detail, images] = await Promise.all([
        this.api.edge(a, b),
        this.api.edgeImages(a, b),
      ]);
      if (seq !== this.requestSeq) return;
      renderEdgePanel(this.panel, this.api, detail, images);
    } catch (error) {
      if (seq !== this.requestSeq) return;
      renderError(this.panel, `failed to load edge ${a}-${b}: ${String(error)}`, () =>
        void this.selectEdge(a, b),
      );
    }
  }
}

export function boot(root: HTMLElement, api: Api = new HttpApi()): Explorer {
  const explorer = new Explorer(root, api);
  void explorer.load();
  return explorer;
}

// browser entry point; tests import Explorer/boot instead
const rootElement = document.getElementById("app");
if (rootElement && !("__FACEGRAPH_TEST__" in window)) {
  boot(rootElement);
}
