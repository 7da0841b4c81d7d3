import type { GraphDocument } from "./types";
import type { Selection } from "./state";

const SVG_NS = "http://www.w3.org/2000/svg";
const VIEW = 1000; // viewBox is VIEW x VIEW, margin around content
const MARGIN = 60;
const NODE_FILL = "#d9d9d9";
const MIN_ZOOM = 0.2;
const MAX_ZOOM = 12;

export interface GraphCallbacks {
  onNodeClick(id: number): void;
  onEdgeClick(i: number, j: number): void;
}

interface Transform {
  x: number;
  y: number;
  k: number;
}

/**
 * SVG node-link view of the computed graph with pan (drag) and zoom (wheel).
 * Geometry and styling come from the document untouched: positions are mapped
 * by one uniform scale (aspect ratio preserved), radii use the same scale,
 * stroke widths and colors are the backend values.
 */
export class GraphView {
  private svg: SVGSVGElement;
  private viewport: SVGGElement;
  private transform: Transform = { x: 0, y: 0, k: 1 };
  private dragging = false;
  private dragStart = { x: 0, y: 0, tx: 0, ty: 0 };

  constructor(
    private container: HTMLElement,
    private callbacks: GraphCallbacks,
  ) {
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("viewBox", `0 0 ${VIEW} ${VIEW}`);
    this.svg.setAttribute("preserveAspectRatio", "xMidYMid meet");
    this.svg.classList.add("graph-canvas");
    this.viewport = document.createElementNS(SVG_NS, "g");
    this.viewport.classList.add("viewport");
    this.svg.appendChild(this.viewport);
    container.appendChild(this.svg);
    this.bindPanZoom();
  }

  render(doc: GraphDocument): void {
    this.viewport.textContent = "";
    if (doc.nodes.length === 0) return;

    const xs = doc.nodes.map((n) => n.position[0]);
    const ys = doc.nodes.map((n) => n.position[1]);
    const minX = Math.min(...xs);
    const maxX = Math.max(...xs);
    const minY = Math.min(...ys);
    const maxY = Math.max(...ys);
    const extent = Math.max(maxX - minX, maxY - minY);
    const drawable = VIEW - 2 * MARGIN;
    const scale = extent > 0 ? drawable / extent : 1;
    const offX = MARGIN + (drawable - (maxX - minX) * scale) / 2;
    const offY = MARGIN + (drawable - (maxY - minY) * scale) / 2;
    const px = (p: [number, number]): [number, number] => [
      offX + (p[0] - minX) * scale,
      offY + (p[1] - minY) * scale,
    ];
    const centers = new Map<number, [number, number]>();
    for (const node of doc.nodes) {
      centers.set(node.subject_id, px(node.position));
    }

    for (const edge of doc.edges) {
      const a = centers.get(edge.i);
      const b = centers.get(edge.j);
      if (!a || !b) continue;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(a[0]));
      line.setAttribute("y1", String(a[1]));
      line.setAttribute("x2", String(b[0]));
      line.setAttribute("y2", String(b[1]));
      line.setAttribute("stroke", edge.color.hex);
      line.setAttribute("stroke-width", String(edge.width));
      line.setAttribute("vector-effect", "non-scaling-stroke");
      line.classList.add("edge");
      line.dataset.pair = `${edge.i}-${edge.j}`;
      line.addEventListener("click", (event) => {
        event.stopPropagation();
        this.callbacks.onEdgeClick(edge.i, edge.j);
      });
      this.viewport.appendChild(line);
    }

    for (const node of doc.nodes) {
      const [cx, cy] = centers.get(node.subject_id)!;
      const group = document.createElementNS(SVG_NS, "g");
      group.classList.add("node");
      group.dataset.subjectId = String(node.subject_id);

      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(cx));
      circle.setAttribute("cy", String(cy));
      circle.setAttribute("r", String(node.radius * scale));
      circle.setAttribute("fill", NODE_FILL);
      circle.setAttribute("stroke", node.border_color.hex);
      circle.setAttribute("stroke-width", "3");
      circle.setAttribute("vector-effect", "non-scaling-stroke");

      const tooltip = document.createElementNS(SVG_NS, "title");
      tooltip.textContent = `${node.name} — ${node.image_count} image${
        node.image_count === 1 ? "" : "s"
      }`;
      circle.appendChild(tooltip);

      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(cx));
      label.setAttribute("y", String(cy + node.radius * scale + 16));
      label.setAttribute("text-anchor", "middle");
      label.classList.add("node-label");
      label.textContent = node.name;

      group.appendChild(circle);
      group.appendChild(label);
      group.addEventListener("click", (event) => {
        event.stopPropagation();
        this.callbacks.onNodeClick(node.subject_id);
      });
      this.viewport.appendChild(group);
    }
  }

  setSelection(selection: Selection): void {
    for (const el of this.viewport.querySelectorAll(".selected")) {
      el.classList.remove("selected");
    }
    if (selection.kind === "node") {
      this.viewport
        .querySelector(`.node[data-subject-id="${selection.id}"]`)
        ?.classList.add("selected");
    } else if (selection.kind === "edge") {
      this.viewport
        .querySelector(`.edge[data-pair="${selection.i}-${selection.j}"]`)
        ?.classList.add("selected");
    }
  }

  private applyTransform(): void {
    const { x, y, k } = this.transform;
    this.viewport.setAttribute("transform", `translate(${x} ${y}) scale(${k})`);
  }

  private bindPanZoom(): void {
    this.svg.addEventListener("pointerdown", (event) => {
      this.dragging = true;
      this.dragStart = {
        x: event.clientX,
        y: event.clientY,
        tx: this.transform.x,
        ty: this.transform.y,
      };
    });
    this.svg.addEventListener("pointermove", (event) => {
      if (!this.dragging) return;
      this.transform.x = this.dragStart.tx + (event.clientX - this.dragStart.x);
      this.transform.y = this.dragStart.ty + (event.clientY - this.dragStart.y);
      this.applyTransform();
    });
    const stop = () => {
      this.dragging = false;
    };
    this.svg.addEventListener("pointerup", stop);
    this.svg.addEventListener("pointerleave", stop);

    this.svg.addEventListener("wheel", (event) => {
      event.preventDefault();
      const factor = event.deltaY < 0 ? 1.15 : 1 / 1.15;
      const next = Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, this.transform.k * factor));
      const ratio = next / this.transform.k;
      // keep the cursor's world point fixed while zooming
      const rect = this.svg.getBoundingClientRect();
      const cx = event.clientX - rect.left;
      const cy = event.clientY - rect.top;
      this.transform.x = cx - ratio * (cx - this.transform.x);
      this.transform.y = cy - ratio * (cy - this.transform.y);
      this.transform.k = next;
      this.applyTransform();
    });
  }

  get zoom(): number {
    return this.transform.k;
  }
}
