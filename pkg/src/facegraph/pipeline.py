"""End-to-end orchestration: ingest -> match -> connect -> layout -> style -> export.

Each stage also has a file-level entry point reading the previous stage's dump,
so stages can be run and inspected individually. All outputs are byte-stable
for identical inputs and seed.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import connectivity, enrollment, graphdoc, ingest, layout as layout_mod

log = logging.getLogger(__name__)


@dataclass
class RunConfig:
    faces_path: Path
    enrolled_path: Path
    out_dir: Path
    images_path: Path | None = None
    theta: float = enrollment.DEFAULT_THETA
    n_f: float = 4.0
    size_similarity_min: float = 0.7
    weights: tuple[float, float, float, float, float] = (1.0, 1.0, 1.0, 1.0, 1.0)
    seed: int = 42
    solver: dict = field(default_factory=dict)  # SolverConfig field overrides

    def connectivity_config(self) -> connectivity.ConnectivityConfig:
        return connectivity.ConnectivityConfig(
            n_f=self.n_f,
            size_similarity_min=self.size_similarity_min,
            weights=tuple(self.weights),
        )

    def solver_config(self) -> layout_mod.SolverConfig:
        return layout_mod.SolverConfig(seed=self.seed, **self.solver)

    def echo(self) -> dict:
        return {
            "theta": self.theta,
            "n_f": self.n_f,
            "size_similarity_min": self.size_similarity_min,
            "weights": list(self.weights),
            "seed": self.seed,
        }


@dataclass(eq=False)
class AnalysisResult:
    records: list
    rejects: list
    images: list
    subjects: list
    faces: dict
    presence: enrollment.PresenceMatrix
    bundle: connectivity.ConnectivityBundle
    layout: layout_mod.Layout
    document: graphdoc.GraphDocument


def load_inputs(cfg: RunConfig):
    with open(cfg.faces_path) as fh:
        records, rejects = ingest.parse_face_records(fh)
    image_meta = None
    if cfg.images_path is not None:
        image_meta = ingest.parse_images(Path(cfg.images_path).read_text())
    images = ingest.build_image_index(records, image_meta)
    with open(cfg.enrolled_path) as fh:
        subjects = ingest.parse_enrolled(fh)
    return records, rejects, images, subjects


def analyze(cfg: RunConfig) -> AnalysisResult:
    records, rejects, images, subjects = load_inputs(cfg)
    for r in rejects:
        log.warning("rejected faces line %d: %s", r.line, r.reason)
    faces = ingest.attach_derived(records)

    match = enrollment.match_faces_to_subjects(records, subjects, theta=cfg.theta)
    presence = enrollment.build_presence(match, records,
                                         image_ids=[e.image_id for e in images])
    bundle = connectivity.compute_bundle(presence, faces, cfg.connectivity_config())
    no_conn = layout_mod.no_connectivity(bundle.t)
    lay = layout_mod.solve_layout(no_conn.w, cfg.solver_config())

    nodes = graphdoc.style_nodes(lay, subjects, presence, faces)
    edges = graphdoc.style_edges(bundle, presence, faces)
    metadata = {
        "n_images": len(images),
        "n_faces": len(records),
        "n_subjects": len(subjects),
        "n_rejected": len(rejects),
        "mae": lay.mae,
        "stress": lay.stress,
        "seed": cfg.seed,
        "config": cfg.echo(),
    }
    doc = graphdoc.build_document(nodes, edges, metadata)
    return AnalysisResult(records=records, rejects=rejects, images=images,
                          subjects=subjects, faces=faces, presence=presence,
                          bundle=bundle, layout=lay, document=doc)


# ---------------------------------------------------------------------------
# dumps

def connectivity_obj(bundle: connectivity.ConnectivityBundle) -> dict:
    return {
        "matrices": {name: m.tolist() for name, m in bundle.matrices().items()},
        "config": {
            "n_f": bundle.config.n_f,
            "size_similarity_min": bundle.config.size_similarity_min,
            "weights": list(bundle.config.weights),
            "epsilon_norm": bundle.config.epsilon_norm,
            "size_gate_literal": bundle.config.size_gate_literal,
        },
        "pair_images": {f"{i},{j}": list(ids) for (i, j), ids in sorted(bundle.pair_images.items())},
    }


def layout_obj(lay: layout_mod.Layout, w: np.ndarray, cfg: RunConfig) -> dict:
    return {
        "positions": lay.positions.tolist(),
        "w": w.tolist(),
        "stress": lay.stress,
        "mae": lay.mae,
        "iterations": lay.iterations,
        "seed": lay.seed,
        "config": cfg.echo(),
    }


def service_state_obj(result: AnalysisResult) -> dict:
    """Sidecar with everything the read-only service needs beyond graph.json:
    per-(subject, image) representative faces and per-face geometry/expressions."""
    presence_entries = []
    pres = result.presence
    for i in range(pres.n_subjects):
        for t in range(pres.n_images):
            if pres.p[i, t]:
                presence_entries.append({
                    "subject_id": i,
                    "image_id": int(pres.image_ids[t]),
                    "face_id": int(pres.best_face[i, t]),
                    "score": float(pres.best_score[i, t]),
                })
    face_objs = {
        str(r.face_id): {
            "image_id": r.image_id,
            "bbox": list(r.bbox),
            "expression": r.expression.tolist(),
        }
        for r in result.records
    }
    image_objs = {
        str(e.image_id): {"path": e.path, "size": list(e.size) if e.size else None}
        for e in result.images
    }
    return {"presence": presence_entries, "faces": face_objs, "images": image_objs}


def write_outputs(result: AnalysisResult, cfg: RunConfig) -> dict[str, Path]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    no_conn = layout_mod.no_connectivity(result.bundle.t)

    paths = {
        "connectivity": out / "connectivity.json",
        "layout": out / "layout.json",
        "graph": out / "graph.json",
        "svg": out / "graph.svg",
        "service_state": out / "service_state.json",
        "report": out / "report.txt",
    }
    paths["connectivity"].write_bytes(
        graphdoc.dump_json_bytes(connectivity_obj(result.bundle), round_floats=False))
    paths["layout"].write_bytes(
        graphdoc.dump_json_bytes(layout_obj(result.layout, no_conn.w, cfg), round_floats=False))
    paths["graph"].write_bytes(graphdoc.export_json(result.document))
    paths["svg"].write_bytes(graphdoc.export_svg(result.document))
    paths["service_state"].write_bytes(
        graphdoc.dump_json_bytes(service_state_obj(result), round_floats=False))
    paths["report"].write_text(report_text(result))
    return paths


def report_text(result: AnalysisResult) -> str:
    meta = result.document.metadata
    lines = [
        f"images:            {meta['n_images']}",
        f"faces:             {meta['n_faces']}",
        f"rejected records:  {meta['n_rejected']}",
        f"enrolled subjects: {meta['n_subjects']}",
        f"graph edges:       {len(result.document.edges)}",
        f"layout stress:     {meta['stress']:.6g}",
        f"layout MAE:        {meta['mae']:.6g}",
        f"seed:              {meta['seed']}",
    ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# stage-level entry points (each reads the previous stage's dump)

def stage_match(cfg: RunConfig) -> Path:
    records, rejects, images, subjects = load_inputs(cfg)
    match = enrollment.match_faces_to_subjects(records, subjects, theta=cfg.theta)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "matches.json"
    path.write_bytes(graphdoc.dump_json_bytes({
        "theta": cfg.theta,
        "matches": enrollment.match_triplets(match, records),
    }, round_floats=False))
    return path


def _presence_from_matches(matches_path: Path, records, images,
                           n_e: int) -> enrollment.PresenceMatrix:
    data = json.loads(Path(matches_path).read_text())
    index = {r.face_id: k for k, r in enumerate(records)}
    scores = np.zeros((len(records), n_e))
    y = np.zeros((len(records), n_e), dtype=bool)
    for m in data["matches"]:
        k = index[m["face_id"]]
        scores[k, m["subject_id"]] = m["score"]
        y[k, m["subject_id"]] = True
    match = enrollment.MatchMatrix(scores=scores, y=y, theta=data["theta"])
    return enrollment.build_presence(match, records, image_ids=[e.image_id for e in images])


def stage_connect(cfg: RunConfig, matches_path: Path) -> Path:
    records, _, images, subjects = load_inputs(cfg)
    faces = ingest.attach_derived(records)
    presence = _presence_from_matches(matches_path, records, images, len(subjects))
    bundle = connectivity.compute_bundle(presence, faces, cfg.connectivity_config())
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "connectivity.json"
    path.write_bytes(graphdoc.dump_json_bytes(connectivity_obj(bundle), round_floats=False))
    return path


def stage_layout(cfg: RunConfig, connectivity_path: Path) -> Path:
    data = json.loads(Path(connectivity_path).read_text())
    t = np.asarray(data["matrices"]["T"], dtype=np.float64)
    no_conn = layout_mod.no_connectivity(t)
    lay = layout_mod.solve_layout(no_conn.w, cfg.solver_config())
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "layout.json"
    path.write_bytes(graphdoc.dump_json_bytes(layout_obj(lay, no_conn.w, cfg), round_floats=False))
    return path


def _bundle_from_obj(data: dict) -> connectivity.ConnectivityBundle:
    cfg_obj = data["config"]
    cfg = connectivity.ConnectivityConfig(
        n_f=cfg_obj["n_f"],
        size_similarity_min=cfg_obj["size_similarity_min"],
        weights=tuple(cfg_obj["weights"]),
        epsilon_norm=cfg_obj["epsilon_norm"],
        size_gate_literal=cfg_obj["size_gate_literal"],
    )
    m = {name: np.asarray(arr, dtype=np.float64) for name, arr in data["matrices"].items()}
    pair_images = {}
    for key, ids in data["pair_images"].items():
        i, j = key.split(",")
        pair_images[(int(i), int(j))] = tuple(ids)
    return connectivity.ConnectivityBundle(c=m["C"], d=m["D"], z=m["Z"], e=m["E"],
                                           h=m["H"], t=m["T"], config=cfg,
                                           pair_images=pair_images)


def stage_render(cfg: RunConfig, matches_path: Path, connectivity_path: Path,
                 layout_path: Path) -> tuple[Path, Path]:
    records, rejects, images, subjects = load_inputs(cfg)
    faces = ingest.attach_derived(records)
    presence = _presence_from_matches(matches_path, records, images, len(subjects))
    bundle = _bundle_from_obj(json.loads(Path(connectivity_path).read_text()))
    lay_data = json.loads(Path(layout_path).read_text())
    lay = layout_mod.Layout(
        positions=np.asarray(lay_data["positions"], dtype=np.float64),
        stress=lay_data["stress"], mae=lay_data["mae"],
        iterations=lay_data["iterations"], seed=lay_data["seed"],
    )
    nodes = graphdoc.style_nodes(lay, subjects, presence, faces)
    edges = graphdoc.style_edges(bundle, presence, faces)
    metadata = {
        "n_images": len(images),
        "n_faces": len(records),
        "n_subjects": len(subjects),
        "n_rejected": len(rejects),
        "mae": lay.mae,
        "stress": lay.stress,
        "seed": cfg.seed,
        "config": cfg.echo(),
    }
    doc = graphdoc.build_document(nodes, edges, metadata)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    graph_path = out / "graph.json"
    svg_path = out / "graph.svg"
    graph_path.write_bytes(graphdoc.export_json(doc))
    svg_path.write_bytes(graphdoc.export_svg(doc))
    return graph_path, svg_path
