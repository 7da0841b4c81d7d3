"""Parse and validate per-face feature records, image metadata and the enrollment list.

Input files are produced upstream by the face-analysis extractors; this module
only checks, normalizes and indexes them into immutable collections.
"""

import json
import logging
import math
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

EXPRESSION_LABELS = ("angry", "disgust", "scared", "happy", "sad", "surprised", "neutral")
HAPPY_INDEX = 3

DESCRIPTOR_DIM = 512
N_LANDMARKS = 68
# 0-based indices of the left+right eye points in the 68-point landmark convention
EYE_LANDMARKS = tuple(range(36, 48))

GENDER_LABELS = ("female", "male")

# expression probabilities are serialized at low precision; allow a little slack
EXPRESSION_MASS_RANGE = (0.95, 1.05)
MIN_DESCRIPTOR_NORM = 1e-6


@dataclass(frozen=True, eq=False)
class FaceRecord:
    """One detected face with its upstream-extracted features."""

    face_id: int
    image_id: int
    bbox: tuple[float, float, float, float]  # x1, y1, x2, y2 (x right, y down)
    landmarks: np.ndarray        # (68, 2)
    pose_direction: np.ndarray   # (2,) unit vector, projected head direction
    expression: np.ndarray       # (7,) probabilities in EXPRESSION_LABELS order
    age: float
    gender: str
    gender_confidence: float | None
    descriptor: np.ndarray       # (512,) unit norm


@dataclass(frozen=True)
class FaceDerived:
    """Geometry derived from a FaceRecord: scale, bbox center and mid-eye point."""

    face_scale: float
    center: tuple[float, float]
    gaze_origin: tuple[float, float]


@dataclass(frozen=True, eq=False)
class Face:
    """A FaceRecord together with its derived geometry."""

    record: FaceRecord
    derived: FaceDerived

    @property
    def scale(self) -> float:
        return self.derived.face_scale

    @property
    def center(self) -> tuple[float, float]:
        return self.derived.center

    @property
    def gaze_origin(self) -> tuple[float, float]:
        return self.derived.gaze_origin

    @property
    def pose(self) -> np.ndarray:
        return self.record.pose_direction

    @property
    def expression(self) -> np.ndarray:
        return self.record.expression


@dataclass(frozen=True)
class ImageEntry:
    image_id: int
    path: str | None
    size: tuple[int, int] | None  # (width, height)
    face_ids: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class EnrolledSubject:
    subject_id: int
    name: str
    descriptor: np.ndarray  # (512,) unit norm
    face_id: int | None = None


@dataclass(frozen=True)
class Rejection:
    line: int
    reason: str


class IngestError(Exception):
    """Fatal ingest failure (unreadable stream, inconsistent enrollment)."""


def _check_record(obj: dict) -> str | None:
    """Return a rejection reason for a parsed record object, or None if valid."""
    for key in ("face_id", "image_id", "bbox", "landmarks", "pose", "expression",
                "age", "gender", "descriptor"):
        if key not in obj:
            return f"missing field '{key}'"
    if not isinstance(obj["face_id"], int) or obj["face_id"] < 0:
        return "face_id must be a nonnegative integer"
    if not isinstance(obj["image_id"], int) or obj["image_id"] < 0:
        return "image_id must be a nonnegative integer"
    bbox = obj["bbox"]
    if len(bbox) != 4 or not all(isinstance(v, (int, float)) for v in bbox):
        return "bbox must be four numbers"
    x1, y1, x2, y2 = (float(v) for v in bbox)
    if not (x2 > x1 and y2 > y1):
        return "bbox must have positive width and height"
    if len(obj["landmarks"]) != N_LANDMARKS:
        return f"expected {N_LANDMARKS} landmarks, got {len(obj['landmarks'])}"
    if len(obj["pose"]) != 2:
        return "pose must be a 2-vector"
    if math.hypot(*obj["pose"]) < 1e-12:
        return "pose direction has zero norm"
    expr = obj["expression"]
    if len(expr) != len(EXPRESSION_LABELS):
        return f"expected {len(EXPRESSION_LABELS)} expression values"
    if any(not (0.0 <= float(v) <= 1.0) for v in expr):
        return "expression components out of [0,1]"
    mass = float(sum(expr))
    if not (EXPRESSION_MASS_RANGE[0] <= mass <= EXPRESSION_MASS_RANGE[1]):
        return "expression mass out of range"
    if float(obj["age"]) < 0:
        return "age must be nonnegative"
    gender = obj["gender"]
    if not isinstance(gender, dict) or gender.get("label") not in GENDER_LABELS:
        return "gender label must be 'female' or 'male'"
    conf = gender.get("confidence")
    if conf is not None and not (0.0 <= float(conf) <= 1.0):
        return "gender confidence out of [0,1]"
    desc = obj["descriptor"]
    if len(desc) != DESCRIPTOR_DIM:
        return f"expected {DESCRIPTOR_DIM}-element descriptor"
    if float(np.linalg.norm(np.asarray(desc, dtype=np.float64))) < MIN_DESCRIPTOR_NORM:
        return "descriptor norm below minimum"
    return None


def _record_from_obj(obj: dict) -> FaceRecord:
    descriptor = np.asarray(obj["descriptor"], dtype=np.float64)
    descriptor = descriptor / np.linalg.norm(descriptor)
    pose = np.asarray(obj["pose"], dtype=np.float64)
    pose = pose / np.linalg.norm(pose)
    gender = obj["gender"]
    conf = gender.get("confidence")
    return FaceRecord(
        face_id=obj["face_id"],
        image_id=obj["image_id"],
        bbox=tuple(float(v) for v in obj["bbox"]),
        landmarks=np.asarray(obj["landmarks"], dtype=np.float64),
        pose_direction=pose,
        expression=np.asarray(obj["expression"], dtype=np.float64),
        age=float(obj["age"]),
        gender=gender["label"],
        gender_confidence=None if conf is None else float(conf),
        descriptor=descriptor,
    )


def parse_face_records(stream) -> tuple[list[FaceRecord], list[Rejection]]:
    """Parse newline-delimited face records from a text stream or line iterable.

    Malformed lines are collected as Rejection entries (with 1-based line
    numbers), never silently dropped. Descriptors and pose directions of
    accepted records are renormalized to unit length.
    """
    records: list[FaceRecord] = []
    rejects: list[Rejection] = []
    seen_ids: set[int] = set()
    try:
        lines = iter(stream)
    except TypeError as exc:
        raise IngestError(f"unreadable face record stream: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            rejects.append(Rejection(lineno, f"invalid JSON: {exc.msg}"))
            continue
        reason = _check_record(obj) if isinstance(obj, dict) else "record must be an object"
        if reason is None and obj["face_id"] in seen_ids:
            reason = f"duplicate face_id {obj['face_id']}"
        if reason is not None:
            rejects.append(Rejection(lineno, reason))
            continue
        record = _record_from_obj(obj)
        seen_ids.add(record.face_id)
        records.append(record)
    return records, rejects


def record_to_obj(record: FaceRecord) -> dict:
    """Serialize a record back to its JSON-lines object form (round-trip safe)."""
    gender: dict = {"label": record.gender}
    if record.gender_confidence is not None:
        gender["confidence"] = record.gender_confidence
    return {
        "face_id": record.face_id,
        "image_id": record.image_id,
        "bbox": list(record.bbox),
        "landmarks": record.landmarks.tolist(),
        "pose": record.pose_direction.tolist(),
        "expression": record.expression.tolist(),
        "age": record.age,
        "gender": gender,
        "descriptor": record.descriptor.tolist(),
    }


def dump_face_records(records: list[FaceRecord]) -> str:
    return "".join(json.dumps(record_to_obj(r)) + "\n" for r in records)


def derive_face(record: FaceRecord) -> FaceDerived:
    """Compute face scale sqrt(w*h), bbox center and the mid-eye gaze origin."""
    x1, y1, x2, y2 = record.bbox
    w, h = x2 - x1, y2 - y1
    scale = math.sqrt(w * h)
    center = ((x1 + x2) / 2.0, (y1 + y2) / 2.0)
    eye_pts = record.landmarks[EYE_LANDMARKS[0]:EYE_LANDMARKS[-1] + 1].tolist()
    gx = sum(p[0] for p in eye_pts) / len(eye_pts)
    gy = sum(p[1] for p in eye_pts) / len(eye_pts)
    # sanity gate: mid-eye point should fall inside the bbox grown by 50% per side
    if not (x1 - 0.5 * w <= gx <= x2 + 0.5 * w and y1 - 0.5 * h <= gy <= y2 + 0.5 * h):
        log.warning("face %d: gaze origin (%.1f, %.1f) outside expanded bbox",
                    record.face_id, gx, gy)
    return FaceDerived(face_scale=scale, center=center, gaze_origin=(float(gx), float(gy)))


def attach_derived(records: list[FaceRecord]) -> dict[int, Face]:
    """Map face_id -> Face(record, derived) for all records."""
    return {r.face_id: Face(r, derive_face(r)) for r in records}


def build_image_index(records: list[FaceRecord],
                      image_meta: list[dict] | None = None) -> list[ImageEntry]:
    """Group faces by image, one entry per distinct image_id, sorted by image_id.

    image_meta (parsed images.json) contributes optional paths and sizes; meta
    entries for images without faces are kept so the collection size n matches
    the metadata when provided.
    """
    by_image: dict[int, list[int]] = {}
    for r in records:
        by_image.setdefault(r.image_id, []).append(r.face_id)
    meta: dict[int, dict] = {}
    if image_meta:
        for m in image_meta:
            meta[int(m["image_id"])] = m
    entries = []
    for image_id in sorted(by_image.keys() | meta.keys()):
        m = meta.get(image_id, {})
        size = None
        if m.get("width") is not None and m.get("height") is not None:
            size = (int(m["width"]), int(m["height"]))
        entries.append(ImageEntry(
            image_id=image_id,
            path=m.get("path"),
            size=size,
            face_ids=tuple(sorted(by_image.get(image_id, ()))),
        ))
    return entries


def parse_images(text: str) -> list[dict]:
    """Parse images.json: an array of {image_id, path, width, height}."""
    data = json.loads(text)
    if not isinstance(data, list):
        raise IngestError("images.json must be a JSON array")
    return data


def parse_enrolled(stream) -> list[EnrolledSubject]:
    """Parse enrolled.jsonl; subject_ids must be contiguous 0..n_e-1.

    Descriptors are renormalized to unit length like face descriptors.
    Inconsistent enrollment is fatal: the subject list defines the matrix
    indices every downstream stage relies on.
    """
    subjects: list[EnrolledSubject] = []
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"enrolled line {lineno}: invalid JSON: {exc.msg}") from exc
        desc = np.asarray(obj["descriptor"], dtype=np.float64)
        if desc.shape != (DESCRIPTOR_DIM,):
            raise IngestError(f"enrolled line {lineno}: expected {DESCRIPTOR_DIM}-element descriptor")
        norm = float(np.linalg.norm(desc))
        if norm < MIN_DESCRIPTOR_NORM:
            raise IngestError(f"enrolled line {lineno}: descriptor norm below minimum")
        subjects.append(EnrolledSubject(
            subject_id=int(obj["subject_id"]),
            name=str(obj["name"]),
            descriptor=desc / norm,
            face_id=obj.get("face_id"),
        ))
    subjects.sort(key=lambda s: s.subject_id)
    if [s.subject_id for s in subjects] != list(range(len(subjects))):
        raise IngestError("enrolled subject_ids must be contiguous 0..n_e-1")
    return subjects
