"""Read-only HTTP service over a precomputed graph document.

All endpoint responses are pure functions of the state loaded at startup;
there are no write paths. Analysis happens offline via the CLI, the service
only serves its outputs plus the image files, and optionally hosts the built
explorer UI at /.
"""

import json
import mimetypes
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from .graphdoc import GraphDocument, parse_document
from .ingest import EXPRESSION_LABELS

SORT_KEYS = set(EXPRESSION_LABELS) | {"none"}


@dataclass(eq=False)
class ServiceState:
    graph_bytes: bytes
    document: GraphDocument
    # sidecar detail (service_state.json): required only by the image-listing endpoints
    presence: list = field(default_factory=list)   # {subject_id, image_id, face_id, score}
    faces: dict = field(default_factory=dict)      # face_id(str) -> {image_id, bbox, expression}
    images: dict = field(default_factory=dict)     # image_id(str) -> {path, size}
    image_root: Path | None = None

    @property
    def n_subjects(self) -> int:
        return len(self.document.nodes)


def load_state(graph_path, image_root=None, state_path=None) -> ServiceState:
    """Load graph.json plus the service_state.json sidecar (defaults to the
    sibling file written by `facegraph analyze`)."""
    graph_path = Path(graph_path)
    graph_bytes = graph_path.read_bytes()
    document = parse_document(graph_bytes)
    state = ServiceState(
        graph_bytes=graph_bytes,
        document=document,
        image_root=Path(image_root).resolve() if image_root else None,
    )
    if state_path is None:
        candidate = graph_path.parent / "service_state.json"
        state_path = candidate if candidate.exists() else None
    if state_path is not None:
        detail = json.loads(Path(state_path).read_text())
        state.presence = detail.get("presence", [])
        state.faces = detail.get("faces", {})
        state.images = detail.get("images", {})
    return state


def create_app(state: ServiceState, ui_dir=None) -> FastAPI:
    app = FastAPI(title="facegraph", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    nodes_by_id = {n.subject_id: n for n in state.document.nodes}
    edges_by_pair = {(e.i, e.j): e for e in state.document.edges}
    subject_presence: dict[int, list[dict]] = {}
    for entry in state.presence:
        subject_presence.setdefault(entry["subject_id"], []).append(entry)

    def not_found(detail: str):
        return JSONResponse({"detail": detail}, status_code=404)

    @app.get("/api/graph")
    def get_graph():
        return Response(content=state.graph_bytes, media_type="application/json")

    @app.get("/api/subjects/{subject_id}")
    def get_subject(subject_id: int):
        node = nodes_by_id.get(subject_id)
        if node is None:
            return not_found(f"unknown subject {subject_id}")
        neighbors = []
        for (i, j), edge in sorted(edges_by_pair.items()):
            if subject_id in (i, j):
                neighbors.append({
                    "subject_id": j if i == subject_id else i,
                    "t": edge.breakdown["T"],
                    "co_image_count": edge.co_image_count,
                })
        return {
            "subject_id": node.subject_id,
            "name": node.name,
            "image_count": node.image_count,
            "gender": node.gender,
            "mean_age": node.mean_age,
            "expression_stats": {
                "histogram": list(node.expression_stats.histogram),
                "predominant": node.expression_stats.predominant,
                "happiness_share": node.expression_stats.happiness_share,
                "empty": node.expression_stats.empty,
            },
            "neighbors": neighbors,
        }

    @app.get("/api/subjects/{subject_id}/images")
    def get_subject_images(subject_id: int, sort_by: str = "none",
                           order: str = "desc", limit: int | None = None):
        if not 0 <= subject_id < state.n_subjects:
            return not_found(f"unknown subject {subject_id}")
        if sort_by not in SORT_KEYS:
            return JSONResponse(
                {"detail": f"sort_by must be one of {sorted(SORT_KEYS)}"}, status_code=400)
        if order not in ("asc", "desc"):
            return JSONResponse({"detail": "order must be 'asc' or 'desc'"}, status_code=400)
        items = []
        for entry in subject_presence.get(subject_id, []):
            face = state.faces.get(str(entry["face_id"]), {})
            expr = face.get("expression")
            score = None
            if sort_by != "none" and expr is not None:
                score = expr[EXPRESSION_LABELS.index(sort_by)]
            items.append({
                "image_id": entry["image_id"],
                "face_id": entry["face_id"],
                "score": score,
                "bbox": face.get("bbox"),
            })
        items.sort(key=lambda it: it["image_id"])
        if sort_by != "none":
            items.sort(key=lambda it: it["score"] if it["score"] is not None else 0.0,
                       reverse=(order == "desc"))
        if limit is not None:
            items = items[:max(limit, 0)]
        return items

    def resolve_pair(i: int, j: int):
        if i == j:
            return None, JSONResponse({"detail": "no self edges"}, status_code=400)
        if not (0 <= i < state.n_subjects and 0 <= j < state.n_subjects):
            return None, not_found(f"unknown subject pair ({i}, {j})")
        return (min(i, j), max(i, j)), None

    @app.get("/api/edges/{i}/{j}")
    def get_edge(i: int, j: int):
        pair, err = resolve_pair(i, j)
        if err is not None:
            return err
        edge = edges_by_pair.get(pair)
        if edge is None:
            return {
                "i": pair[0], "j": pair[1],
                "breakdown": {k: 0.0 for k in ("C", "D", "Z", "E", "H", "T")},
                "color": None, "width": 0.0, "image_ids": [],
            }
        return {
            "i": edge.i, "j": edge.j,
            "breakdown": dict(edge.breakdown),
            "color": {"name": edge.color[0], "hex": edge.color[1]},
            "width": edge.width,
            "image_ids": list(edge.image_ids),
        }

    @app.get("/api/edges/{i}/{j}/images")
    def get_edge_images(i: int, j: int):
        pair, err = resolve_pair(i, j)
        if err is not None:
            return err
        edge = edges_by_pair.get(pair)
        if edge is None:
            return []
        best = {(e["subject_id"], e["image_id"]): e["face_id"] for e in state.presence}
        out = []
        for image_id in edge.image_ids:
            face_i = state.faces.get(str(best.get((pair[0], image_id))), {})
            face_j = state.faces.get(str(best.get((pair[1], image_id))), {})
            out.append({
                "image_id": image_id,
                "bbox_i": face_i.get("bbox"),
                "bbox_j": face_j.get("bbox"),
            })
        return out

    @app.get("/api/images/{image_id}")
    def get_image(image_id: int):
        if state.image_root is None:
            return not_found("no image directory configured")
        meta = state.images.get(str(image_id))
        if meta is None or not meta.get("path"):
            return not_found(f"no file for image {image_id}")
        resolved = (state.image_root / meta["path"]).resolve()
        if not resolved.is_relative_to(state.image_root):
            return JSONResponse({"detail": "path escapes image root"}, status_code=403)
        if not resolved.is_file():
            return not_found(f"missing file for image {image_id}")
        media_type = mimetypes.guess_type(resolved.name)[0] or "application/octet-stream"
        return Response(content=resolved.read_bytes(), media_type=media_type)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
