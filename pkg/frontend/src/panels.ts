import type { Api } from "./api";
import {
  EXPRESSION_LABELS,
  type EdgeDetail,
  type EdgeImage,
  type SortKey,
  type SubjectDetail,
  type SubjectImage,
} from "./types";

// histogram bar tints only; node/edge colors in the canvas always come from
// the backend payload
const BAR_COLORS: Record<string, string> = {
  angry: "#D62728",
  disgust: "#2CA02C",
  scared: "#404040",
  happy: "#FFD700",
  sad: "#1F77B4",
  surprised: "#BBBBBB",
  neutral: "#9E9E9E",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function galleryTile(api: Api, imageId: number, bboxes: (number[] | null)[]): HTMLElement {
  const tile = el("div", "tile");
  tile.dataset.imageId = String(imageId);
  tile.appendChild(el("div", "tile-placeholder", `#${imageId}`));

  const img = document.createElement("img");
  img.src = api.imageUrl(imageId);
  img.alt = `image ${imageId}`;
  img.addEventListener("load", () => {
    tile.classList.add("loaded");
    const w = img.naturalWidth;
    const h = img.naturalHeight;
    if (!w || !h) return;
    for (const bbox of bboxes) {
      if (!bbox) continue;
      const [x1, y1, x2, y2] = bbox as [number, number, number, number];
      const overlay = el("div", "bbox");
      overlay.style.left = `${(100 * x1) / w}%`;
      overlay.style.top = `${(100 * y1) / h}%`;
      overlay.style.width = `${(100 * (x2 - x1)) / w}%`;
      overlay.style.height = `${(100 * (y2 - y1)) / h}%`;
      tile.appendChild(overlay);
    }
  });
  // missing files keep the placeholder visible
  img.addEventListener("error", () => img.remove());
  tile.appendChild(img);
  return tile;
}

function histogram(stats: SubjectDetail["expression_stats"]): HTMLElement {
  const wrap = el("div", "histogram");
  stats.histogram.forEach((value, index) => {
    const label = EXPRESSION_LABELS[index] ?? `#${index}`;
    const row = el("div", "hist-row");
    row.dataset.label = label;
    row.appendChild(el("span", "hist-label", label));
    const track = el("div", "hist-track");
    const bar = el("div", "hist-bar");
    bar.style.width = `${Math.round(1000 * value) / 10}%`;
    bar.style.background = BAR_COLORS[label] ?? "#888";
    track.appendChild(bar);
    row.appendChild(track);
    row.appendChild(el("span", "hist-value", value.toFixed(3)));
    wrap.appendChild(row);
  });
  return wrap;
}

export interface PanelCallbacks {
  onSortChange(sortBy: SortKey): void;
  onNeighborClick(id: number): void;
}

export function renderSubjectPanel(
  container: HTMLElement,
  api: Api,
  detail: SubjectDetail,
  images: SubjectImage[],
  sortBy: SortKey,
  callbacks: PanelCallbacks,
): void {
  container.textContent = "";
  container.appendChild(el("h2", "panel-title", detail.name));

  const facts = el("dl", "facts");
  const fact = (key: string, value: string) => {
    facts.appendChild(el("dt", undefined, key));
    facts.appendChild(el("dd", undefined, value));
  };
  fact("images", String(detail.image_count));
  fact("gender", detail.gender ?? "unknown");
  fact("mean age", detail.mean_age === null ? "unknown" : detail.mean_age.toFixed(1));
  fact("predominant", detail.expression_stats.predominant);
  container.appendChild(facts);

  container.appendChild(el("h3", undefined, "expressions"));
  container.appendChild(histogram(detail.expression_stats));

  if (detail.neighbors.length > 0) {
    container.appendChild(el("h3", undefined, "connected to"));
    const list = el("ul", "neighbors");
    for (const neighbor of detail.neighbors) {
      const item = el("li");
      const link = el("button", "neighbor-link", `S${neighbor.subject_id}`);
      link.addEventListener("click", () => callbacks.onNeighborClick(neighbor.subject_id));
      item.appendChild(link);
      item.appendChild(
        el("span", "neighbor-meta", ` T=${neighbor.t.toFixed(3)} (${neighbor.co_image_count} shared)`),
      );
      list.appendChild(item);
    }
    container.appendChild(list);
  }

  container.appendChild(el("h3", undefined, "gallery"));
  const sortBar = el("div", "sort-bar");
  const sortLabel = el("label", undefined, "sort by ");
  const select = el("select", "sort-select");
  for (const key of [...EXPRESSION_LABELS, "none"]) {
    const option = el("option", undefined, key);
    option.value = key;
    if (key === sortBy) option.selected = true;
    select.appendChild(option);
  }
  select.addEventListener("change", () => callbacks.onSortChange(select.value as SortKey));
  sortLabel.appendChild(select);
  sortBar.appendChild(sortLabel);
  container.appendChild(sortBar);

  const gallery = el("div", "gallery");
  if (images.length === 0) {
    gallery.appendChild(el("p", "empty-state", "no images for this subject"));
  }
  // server order is authoritative; tiles are appended verbatim
  for (const item of images) {
    const tile = galleryTile(api, item.image_id, [item.bbox]);
    if (item.score !== null) {
      tile.appendChild(el("div", "tile-score", item.score.toFixed(3)));
    }
    gallery.appendChild(tile);
  }
  container.appendChild(gallery);
}

export function renderEdgePanel(
  container: HTMLElement,
  api: Api,
  detail: EdgeDetail,
  images: EdgeImage[],
): void {
  container.textContent = "";
  container.appendChild(el("h2", "panel-title", `S${detail.i} — S${detail.j}`));

  const table = el("table", "breakdown");
  const header = el("tr");
  const row = el("tr");
  for (const key of ["C", "D", "Z", "E", "H", "T"]) {
    header.appendChild(el("th", undefined, key));
    const value = detail.breakdown[key] ?? 0;
    row.appendChild(el("td", undefined, value.toFixed(3)));
  }
  table.appendChild(header);
  table.appendChild(row);
  container.appendChild(table);

  if (detail.color) {
    const swatchRow = el("div", "edge-color", `edge color: ${detail.color.name}`);
    const swatch = el("span", "swatch");
    swatch.style.background = detail.color.hex;
    swatchRow.prepend(swatch);
    container.appendChild(swatchRow);
  }

  container.appendChild(el("h3", undefined, `shared images (${images.length})`));
  const gallery = el("div", "gallery");
  if (images.length === 0) {
    gallery.appendChild(el("p", "empty-state", "no shared images"));
  }
  for (const item of images) {
    gallery.appendChild(galleryTile(api, item.image_id, [item.bbox_i, item.bbox_j]));
  }
  container.appendChild(gallery);
}

export function renderError(container: HTMLElement, message: string, onRetry: () => void): void {
  container.textContent = "";
  const banner = el("div", "error-banner");
  banner.appendChild(el("span", undefined, message));
  const retry = el("button", "retry", "retry");
  retry.addEventListener("click", onRetry);
  banner.appendChild(retry);
  container.appendChild(banner);
}
