"""Assemble the styled graph document and export deterministic JSON and SVG.

The document is the single artifact consumed by the SVG export, the HTTP
service and the explorer UI: styled nodes (radius, border color, stats),
styled edges (width, color, connectivity breakdown, shared image ids) and
collection-level metadata.
"""

import json
import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from .connectivity import ConnectivityBundle
from .enrollment import PresenceMatrix
from .ingest import EXPRESSION_LABELS, HAPPY_INDEX, EnrolledSubject, Face
from .layout import Layout

# expression label -> (color name, RGB hex); names follow the emotion-color
# convention used for the graph styling
COLOR_TABLE = {
    "angry": ("red", "#D62728"),
    "disgust": ("green", "#2CA02C"),
    "scared": ("dark gray", "#404040"),
    "happy": ("yellow", "#FFD700"),
    "sad": ("blue", "#1F77B4"),
    "surprised": ("white", "#FFFFFF"),
    "neutral": ("gray", "#9E9E9E"),
}

DEFAULT_R_MIN = 0.02
DEFAULT_R_MAX = 0.08
DEFAULT_W_MIN = 0.5
DEFAULT_W_MAX = 6.0

FLOAT_DECIMALS = 6


@dataclass(frozen=True)
class ExpressionStats:
    histogram: tuple[float, ...]  # 7 values summing to 1 (uniform when empty)
    predominant: str              # argmax label, ties -> lowest index
    happiness_share: float        # fraction of faces whose argmax is happy
    empty: bool = False


@dataclass(frozen=True)
class SubjectStats:
    expression: ExpressionStats
    gender: str | None
    mean_age: float | None
    n_faces: int


@dataclass(frozen=True)
class GraphNode:
    subject_id: int
    name: str
    position: tuple[float, float]
    image_count: int
    radius: float
    border_color: tuple[str, str]  # (name, hex)
    expression_stats: ExpressionStats
    gender: str | None
    mean_age: float | None
    thumbnail_face_id: int | None = None


@dataclass(frozen=True)
class GraphEdge:
    i: int  # i < j
    j: int
    width: float
    color: tuple[str, str]  # (name, hex)
    co_image_count: int
    breakdown: dict  # C, D, Z, E, H, T values for the pair
    image_ids: tuple[int, ...]


@dataclass(frozen=True)
class GraphDocument:
    metadata: dict
    nodes: list[GraphNode] = field(default_factory=list)
    edges: list[GraphEdge] = field(default_factory=list)


def _argmax_label(values) -> str:
    return EXPRESSION_LABELS[int(np.argmax(values))]


def expression_stats(expressions: list[np.ndarray]) -> ExpressionStats:
    """Aggregate a face set's expression vectors into a normalized histogram."""
    if not expressions:
        uniform = (1.0 / len(EXPRESSION_LABELS),) * len(EXPRESSION_LABELS)
        return ExpressionStats(histogram=uniform, predominant=_argmax_label(uniform),
                               happiness_share=0.0, empty=True)
    total = np.sum(expressions, axis=0)
    hist = total / total.sum()
    happy_faces = sum(1 for e in expressions if int(np.argmax(e)) == HAPPY_INDEX)
    return ExpressionStats(
        histogram=tuple(float(v) for v in hist),
        predominant=_argmax_label(hist),
        happiness_share=happy_faces / len(expressions),
        empty=False,
    )


def subject_stats(subject_id: int, presence: PresenceMatrix,
                  faces: dict[int, Face]) -> SubjectStats:
    """Expression histogram, modal gender and mean age over the subject's
    representative faces across all images where they appear."""
    if not 0 <= subject_id < presence.n_subjects:
        raise KeyError(f"unknown subject {subject_id}")
    face_ids = [int(f) for f in presence.best_face[subject_id] if f >= 0]
    records = [faces[f].record for f in face_ids]
    stats = expression_stats([r.expression for r in records])
    if not records:
        return SubjectStats(expression=stats, gender=None, mean_age=None, n_faces=0)
    counts: dict[str, int] = {}
    for r in records:
        counts[r.gender] = counts.get(r.gender, 0) + 1
    gender = max(sorted(counts), key=counts.get)
    mean_age = float(np.mean([r.age for r in records]))
    return SubjectStats(expression=stats, gender=gender, mean_age=mean_age,
                        n_faces=len(records))


def edge_expression(i: int, j: int, presence: PresenceMatrix,
                    faces: dict[int, Face]) -> str:
    """Most common expression over both subjects' faces in their shared images."""
    both = presence.p[i] & presence.p[j]
    if not both.any():
        raise ValueError(f"subjects {i} and {j} share no images")
    total = np.zeros(len(EXPRESSION_LABELS))
    for t in np.nonzero(both)[0]:
        total += faces[int(presence.best_face[i, t])].record.expression
        total += faces[int(presence.best_face[j, t])].record.expression
    return _argmax_label(total)


def style_nodes(layout: Layout, subjects: list[EnrolledSubject],
                presence: PresenceMatrix, faces: dict[int, Face],
                r_min: float = DEFAULT_R_MIN, r_max: float = DEFAULT_R_MAX) -> list[GraphNode]:
    """One node per enrolled subject; radius grows with the square root of the
    image count so circle area tracks presence roughly linearly."""
    counts = presence.p.sum(axis=1)
    max_count = int(counts.max(initial=0))
    nodes = []
    for s in subjects:
        count = int(counts[s.subject_id])
        ratio = math.sqrt(count / max_count) if max_count > 0 else 0.0
        stats = subject_stats(s.subject_id, presence, faces)
        nodes.append(GraphNode(
            subject_id=s.subject_id,
            name=s.name,
            position=(float(layout.positions[s.subject_id, 0]),
                      float(layout.positions[s.subject_id, 1])),
            image_count=count,
            radius=r_min + (r_max - r_min) * ratio,
            border_color=COLOR_TABLE[stats.expression.predominant],
            expression_stats=stats.expression,
            gender=stats.gender,
            mean_age=stats.mean_age,
            thumbnail_face_id=s.face_id,
        ))
    return nodes


def style_edges(bundle: ConnectivityBundle, presence: PresenceMatrix,
                faces: dict[int, Face],
                w_min: float = DEFAULT_W_MIN, w_max: float = DEFAULT_W_MAX) -> list[GraphEdge]:
    """Edges exist only where subjects co-occur; width scales with the count."""
    max_c = float(bundle.c.max(initial=0.0))
    edges = []
    n_e = bundle.c.shape[0]
    for i in range(n_e):
        for j in range(i + 1, n_e):
            c_ij = float(bundle.c[i, j])
            if c_ij <= 0:
                continue
            label = edge_expression(i, j, presence, faces)
            edges.append(GraphEdge(
                i=i, j=j,
                width=w_min + (w_max - w_min) * c_ij / max_c,
                color=COLOR_TABLE[label],
                co_image_count=int(c_ij),
                breakdown={
                    "C": c_ij,
                    "D": float(bundle.d[i, j]),
                    "Z": float(bundle.z[i, j]),
                    "E": float(bundle.e[i, j]),
                    "H": float(bundle.h[i, j]),
                    "T": float(bundle.t[i, j]),
                },
                image_ids=bundle.pair_images.get((i, j), ()),
            ))
    return edges


def build_document(nodes: list[GraphNode], edges: list[GraphEdge],
                   metadata: dict) -> GraphDocument:
    return GraphDocument(metadata=metadata, nodes=nodes, edges=edges)


# ---------------------------------------------------------------------------
# serialization

def _round_floats(value):
    if isinstance(value, float):
        return round(value, FLOAT_DECIMALS)
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    return value


def dump_json_bytes(obj, round_floats: bool = True) -> bytes:
    """Deterministic JSON bytes: sorted keys, floats fixed at 6 decimals.

    Intermediate stage dumps pass round_floats=False so a chained stage run
    reproduces the in-memory pipeline bit for bit.
    """
    if round_floats:
        obj = _round_floats(obj)
    return (json.dumps(obj, sort_keys=True,
                       separators=(",", ":"), ensure_ascii=False) + "\n").encode("utf-8")


def _stats_obj(stats: ExpressionStats) -> dict:
    return {
        "histogram": list(stats.histogram),
        "predominant": stats.predominant,
        "happiness_share": stats.happiness_share,
        "empty": stats.empty,
    }


def node_to_obj(node: GraphNode) -> dict:
    return {
        "subject_id": node.subject_id,
        "name": node.name,
        "position": list(node.position),
        "image_count": node.image_count,
        "radius": node.radius,
        "border_color": {"name": node.border_color[0], "hex": node.border_color[1]},
        "expression_stats": _stats_obj(node.expression_stats),
        "gender": node.gender,
        "mean_age": node.mean_age,
        "thumbnail_face_id": node.thumbnail_face_id,
    }


def edge_to_obj(edge: GraphEdge) -> dict:
    return {
        "i": edge.i,
        "j": edge.j,
        "width": edge.width,
        "color": {"name": edge.color[0], "hex": edge.color[1]},
        "co_image_count": edge.co_image_count,
        "breakdown": dict(edge.breakdown),
        "image_ids": list(edge.image_ids),
    }


def doc_to_obj(doc: GraphDocument) -> dict:
    return {
        "metadata": doc.metadata,
        "nodes": [node_to_obj(n) for n in doc.nodes],
        "edges": [edge_to_obj(e) for e in doc.edges],
    }


def export_json(doc: GraphDocument) -> bytes:
    return dump_json_bytes(doc_to_obj(doc))


def parse_document(data: bytes | str) -> GraphDocument:
    obj = json.loads(data)
    nodes = []
    for n in obj.get("nodes", []):
        st = n["expression_stats"]
        nodes.append(GraphNode(
            subject_id=n["subject_id"],
            name=n["name"],
            position=tuple(n["position"]),
            image_count=n["image_count"],
            radius=n["radius"],
            border_color=(n["border_color"]["name"], n["border_color"]["hex"]),
            expression_stats=ExpressionStats(
                histogram=tuple(st["histogram"]),
                predominant=st["predominant"],
                happiness_share=st["happiness_share"],
                empty=st["empty"],
            ),
            gender=n["gender"],
            mean_age=n["mean_age"],
            thumbnail_face_id=n["thumbnail_face_id"],
        ))
    edges = []
    for e in obj.get("edges", []):
        edges.append(GraphEdge(
            i=e["i"], j=e["j"],
            width=e["width"],
            color=(e["color"]["name"], e["color"]["hex"]),
            co_image_count=e["co_image_count"],
            breakdown=dict(e["breakdown"]),
            image_ids=tuple(e["image_ids"]),
        ))
    return GraphDocument(metadata=obj.get("metadata", {}), nodes=nodes, edges=edges)


# ---------------------------------------------------------------------------
# SVG export

SVG_CANVAS = 1200
SVG_MARGIN_FRAC = 0.05
NODE_FILL = "#D9D9D9"
NODE_BORDER_WIDTH = 3
LABEL_OFFSET = 14


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def export_svg(doc: GraphDocument, canvas: int = SVG_CANVAS,
               background: str = "#FFFFFF") -> bytes:
    """Standalone SVG 1.1 rendering: edges beneath nodes, labels below circles.

    Layout coordinates map to the canvas by a uniform scale-and-center with a
    5% margin; all emitted coordinates stay inside the canvas.
    """
    margin = SVG_MARGIN_FRAC * canvas
    drawable = canvas - 2 * margin
    if doc.nodes:
        xs = [n.position[0] for n in doc.nodes]
        ys = [n.position[1] for n in doc.nodes]
        min_x, max_x = min(xs), max(xs)
        min_y, max_y = min(ys), max(ys)
        extent = max(max_x - min_x, max_y - min_y)
        scale = drawable / extent if extent > 0 else 1.0
        off_x = margin + (drawable - (max_x - min_x) * scale) / 2
        off_y = margin + (drawable - (max_y - min_y) * scale) / 2
    else:
        min_x = min_y = 0.0
        scale = 1.0
        off_x = off_y = margin

    def to_px(pos):
        return (off_x + (pos[0] - min_x) * scale, off_y + (pos[1] - min_y) * scale)

    px = {n.subject_id: to_px(n.position) for n in doc.nodes}

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{canvas}" height="{canvas}" viewBox="0 0 {canvas} {canvas}">',
        f'<rect width="{canvas}" height="{canvas}" fill="{background}"/>',
    ]
    for e in doc.edges:
        (x1, y1), (x2, y2) = px[e.i], px[e.j]
        lines.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{e.color[1]}" stroke-width="{_fmt(e.width)}"/>')
    for n in doc.nodes:
        cx, cy = px[n.subject_id]
        r = n.radius * scale
        lines.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" fill="{NODE_FILL}" '
            f'stroke="{n.border_color[1]}" stroke-width="{NODE_BORDER_WIDTH}"/>')
        label_y = min(cy + r + LABEL_OFFSET, canvas - 4.0)
        lines.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(label_y)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14" fill="#222222">{escape(n.name)}</text>')
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")
