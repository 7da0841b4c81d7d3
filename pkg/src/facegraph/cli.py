"""Command-line front door: facegraph analyze|match|connect|layout|render|serve|synth.

A JSON config file (--config) can supply any long-form flag value; explicit
flags win over the file.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import pipeline, synth

log = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_PORT = 3


def _add_common_inputs(p: argparse.ArgumentParser):
    p.add_argument("--faces", help="faces.jsonl path")
    p.add_argument("--images", help="images.json path (optional)")
    p.add_argument("--enrolled", help="enrolled.jsonl path")
    p.add_argument("--out", help="output directory")
    p.add_argument("--theta", type=float, help="match threshold (default 0.4)")
    p.add_argument("--n-f", type=float, dest="n_f", help="closeness cutoff in face scales (default 4)")
    p.add_argument("--size-similarity-min", type=float, help="closeness size gate (default 0.7)")
    p.add_argument("--weights", help="five comma-separated connectivity weights (default 1,1,1,1,1)")
    p.add_argument("--seed", type=int, help="random seed (default 42)")
    p.add_argument("--config", help="JSON config file; explicit flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="facegraph",
                                     description="subject connectivity graphs from face records")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the full pipeline and write all artifacts")
    _add_common_inputs(p)

    p = sub.add_parser("match", help="match faces to enrolled subjects -> matches.json")
    _add_common_inputs(p)

    p = sub.add_parser("connect", help="compute connectivity matrices -> connectivity.json")
    _add_common_inputs(p)
    p.add_argument("--matches", help="matches.json from the match stage")

    p = sub.add_parser("layout", help="solve the 2-D layout -> layout.json")
    _add_common_inputs(p)
    p.add_argument("--connectivity", help="connectivity.json from the connect stage")

    p = sub.add_parser("render", help="style and export graph.json + graph.svg")
    _add_common_inputs(p)
    p.add_argument("--matches", help="matches.json from the match stage")
    p.add_argument("--connectivity", help="connectivity.json from the connect stage")
    p.add_argument("--layout", help="layout.json from the layout stage")

    p = sub.add_parser("serve", help="serve a computed graph over HTTP")
    p.add_argument("--graph", help="graph.json path")
    p.add_argument("--image-root", help="directory containing the collection images")
    p.add_argument("--port", type=int, help="port (default 8080)")
    p.add_argument("--host", help="bind host (default 127.0.0.1)")
    p.add_argument("--ui", help="directory of built explorer UI assets to host at /")
    p.add_argument("--config", help="JSON config file; explicit flags win")

    p = sub.add_parser("synth", help="write a synthetic planted-community fixture")
    p.add_argument("--subjects", type=int, help="number of subjects (default 8)")
    p.add_argument("--images", type=int, help="number of images (default 200)")
    p.add_argument("--groups", type=int, help="number of planted groups (default 2)")
    p.add_argument("--noise", type=float, help="max descriptor noise norm (default 0.1)")
    p.add_argument("--seed", type=int, help="random seed (default 42)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="JSON config file; explicit flags win")

    return parser


def _merged(args: argparse.Namespace, defaults: dict) -> dict:
    """Resolution order: explicit flag > config file > built-in default."""
    file_values = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise FileNotFoundError(f"config file not found: {path}")
        file_values = json.loads(path.read_text())
    out = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
        elif key in file_values:
            out[key] = file_values[key]
        else:
            out[key] = default
    return out


def _parse_weights(value) -> tuple:
    if isinstance(value, str):
        parts = [float(v) for v in value.split(",")]
    else:
        parts = [float(v) for v in value]
    if len(parts) != 5:
        raise ValueError(f"expected 5 weights, got {len(parts)}")
    return tuple(parts)


def _run_config(args: argparse.Namespace) -> pipeline.RunConfig:
    values = _merged(args, {
        "faces": None, "images": None, "enrolled": None, "out": "out",
        "theta": 0.4, "n_f": 4.0, "size_similarity_min": 0.7,
        "weights": "1,1,1,1,1", "seed": 42, "solver": {},
    })
    for key in ("faces", "enrolled"):
        if values[key] is None:
            raise FileNotFoundError(f"--{key} is required (path to {key} file)")
        if not Path(values[key]).is_file():
            raise FileNotFoundError(f"{key} file not found: {values[key]}")
    if values["images"] is not None and not Path(values["images"]).is_file():
        raise FileNotFoundError(f"images file not found: {values['images']}")
    return pipeline.RunConfig(
        faces_path=Path(values["faces"]),
        enrolled_path=Path(values["enrolled"]),
        images_path=Path(values["images"]) if values["images"] else None,
        out_dir=Path(values["out"]),
        theta=float(values["theta"]),
        n_f=float(values["n_f"]),
        size_similarity_min=float(values["size_similarity_min"]),
        weights=_parse_weights(values["weights"]),
        seed=int(values["seed"]),
        solver=values["solver"],
    )


def cmd_analyze(args) -> int:
    cfg = _run_config(args)
    result = pipeline.analyze(cfg)
    paths = pipeline.write_outputs(result, cfg)
    sys.stdout.write(pipeline.report_text(result))
    sys.stdout.write("artifacts:\n")
    for name in ("connectivity", "layout", "graph", "svg", "service_state", "report"):
        sys.stdout.write(f"  {paths[name]}\n")
    return 0


def cmd_match(args) -> int:
    cfg = _run_config(args)
    path = pipeline.stage_match(cfg)
    sys.stdout.write(f"{path}\n")
    return 0


def cmd_connect(args) -> int:
    cfg = _run_config(args)
    matches = Path(args.matches or Path(cfg.out_dir) / "matches.json")
    if not matches.is_file():
        raise FileNotFoundError(f"matches file not found: {matches}")
    path = pipeline.stage_connect(cfg, matches)
    sys.stdout.write(f"{path}\n")
    return 0


def cmd_layout(args) -> int:
    cfg = _run_config(args)
    conn = Path(args.connectivity or Path(cfg.out_dir) / "connectivity.json")
    if not conn.is_file():
        raise FileNotFoundError(f"connectivity file not found: {conn}")
    path = pipeline.stage_layout(cfg, conn)
    sys.stdout.write(f"{path}\n")
    return 0


def cmd_render(args) -> int:
    cfg = _run_config(args)
    out = Path(cfg.out_dir)
    matches = Path(args.matches or out / "matches.json")
    conn = Path(args.connectivity or out / "connectivity.json")
    lay = Path(args.layout or out / "layout.json")
    for path in (matches, conn, lay):
        if not path.is_file():
            raise FileNotFoundError(f"stage input not found: {path}")
    graph_path, svg_path = pipeline.stage_render(cfg, matches, conn, lay)
    sys.stdout.write(f"{graph_path}\n{svg_path}\n")
    return 0


def cmd_serve(args) -> int:
    from . import service

    values = _merged(args, {
        "graph": "out/graph.json", "image_root": None,
        "port": 8080, "host": "127.0.0.1", "ui": None,
    })
    graph_path = Path(values["graph"])
    if not graph_path.is_file():
        raise FileNotFoundError(f"graph file not found: {graph_path}")
    try:
        state = service.load_state(graph_path, image_root=values["image_root"])
    except (json.JSONDecodeError, KeyError) as exc:
        sys.stderr.write(f"error [serve]: cannot parse {graph_path}: {exc}\n")
        return 1
    ui_dir = values["ui"] or _default_ui_dir()
    app = service.create_app(state, ui_dir=ui_dir)

    import uvicorn
    try:
        uvicorn.run(app, host=values["host"], port=int(values["port"]), log_level="warning")
    except (OSError, SystemExit) as exc:
        if isinstance(exc, OSError):
            sys.stderr.write(f"error [serve]: cannot bind port {values['port']}: {exc}\n")
            return EXIT_PORT
        raise
    return 0


def _default_ui_dir():
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def cmd_synth(args) -> int:
    values = _merged(args, {
        "subjects": 8, "images": 200, "groups": 2,
        "noise": 0.1, "seed": 42, "out": "fixture",
    })
    try:
        synth.write_fixture(values["out"], int(values["subjects"]), int(values["images"]),
                            int(values["groups"]), int(values["seed"]), float(values["noise"]))
    except ValueError as exc:
        sys.stderr.write(f"error [synth]: {exc}\n")
        return EXIT_USAGE
    sys.stdout.write(f"fixture written to {values['out']}\n")
    return 0


COMMANDS = {
    "analyze": ("analyze", cmd_analyze),
    "match": ("ingest", cmd_match),
    "connect": ("connect", cmd_connect),
    "layout": ("layout", cmd_layout),
    "render": ("render", cmd_render),
    "serve": ("serve", cmd_serve),
    "synth": ("synth", cmd_synth),
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    stage, handler = COMMANDS[args.command]
    try:
        return handler(args)
    except FileNotFoundError as exc:
        sys.stderr.write(f"error [{stage}]: {exc}\n")
        return EXIT_USAGE
    except Exception as exc:  # stage-tagged diagnostics, nonzero exit
        sys.stderr.write(f"error [{stage}]: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
