"""Match detected faces to enrolled subjects and build the presence matrix."""

from dataclasses import dataclass

import numpy as np

from .ingest import DESCRIPTOR_DIM, EnrolledSubject, FaceRecord

DEFAULT_THETA = 0.4


@dataclass(frozen=True, eq=False)
class MatchMatrix:
    """Descriptor inner products of faces vs enrolled subjects, thresholded."""

    scores: np.ndarray  # (m, n_e) inner products in [-1, 1]
    y: np.ndarray       # (m, n_e) bool, scores > theta (strict)
    theta: float


@dataclass(frozen=True, eq=False)
class PresenceMatrix:
    """Subject-by-image occupancy with one representative face per cell.

    Columns follow image_ids (sorted distinct image ids of the collection).
    best_face[i, t] is the face_id of the highest-scoring match of subject i
    in image t, or -1 where the subject is absent.
    """

    p: np.ndarray           # (n_e, n) bool
    image_ids: np.ndarray   # (n,) int, sorted ascending
    best_face: np.ndarray   # (n_e, n) int, -1 where absent
    best_score: np.ndarray  # (n_e, n) float, -inf where absent

    @property
    def n_subjects(self) -> int:
        return self.p.shape[0]

    @property
    def n_images(self) -> int:
        return self.p.shape[1]

    def column_of(self, image_id: int) -> int:
        idx = int(np.searchsorted(self.image_ids, image_id))
        if idx >= len(self.image_ids) or self.image_ids[idx] != image_id:
            raise KeyError(f"unknown image_id {image_id}")
        return idx


def match_enrolled(descriptors: np.ndarray, enrolled: np.ndarray,
                   theta: float = DEFAULT_THETA) -> MatchMatrix:
    """Score every face against every enrolled subject; match where score > theta."""
    descriptors = np.asarray(descriptors, dtype=np.float64)
    enrolled = np.asarray(enrolled, dtype=np.float64)
    if descriptors.ndim != 2 or enrolled.ndim != 2 or descriptors.shape[1] != enrolled.shape[1]:
        raise ValueError(
            f"descriptor dimension mismatch: faces {descriptors.shape} vs enrolled {enrolled.shape}")
    if not (0.0 <= theta < 1.0):
        raise ValueError(f"theta must be in [0, 1), got {theta}")
    scores = descriptors @ enrolled.T
    return MatchMatrix(scores=scores, y=scores > theta, theta=theta)


def build_presence(match: MatchMatrix, records: list[FaceRecord],
                   image_ids: list[int] | None = None) -> PresenceMatrix:
    """Collapse face-level matches into subject-by-image presence.

    records must be aligned with the rows of the match matrix. When a subject
    matches several faces in one image, the highest-scoring face wins; score
    ties go to the lowest face_id, so the result is independent of face order.
    """
    m, n_e = match.scores.shape
    if len(records) != m:
        raise ValueError(f"{len(records)} records vs {m} match rows")
    if image_ids is None:
        ids = np.array(sorted({r.image_id for r in records}), dtype=np.int64)
    else:
        ids = np.array(sorted(set(image_ids)), dtype=np.int64)
    n = len(ids)
    col = {int(t): c for c, t in enumerate(ids)}

    p = np.zeros((n_e, n), dtype=bool)
    best_face = np.full((n_e, n), -1, dtype=np.int64)
    best_score = np.full((n_e, n), -np.inf, dtype=np.float64)
    for k in sorted(range(m), key=lambda k: records[k].face_id):
        t = col[records[k].image_id]
        for i in np.nonzero(match.y[k])[0]:
            score = match.scores[k, i]
            if score > best_score[i, t]:  # strict: first (lowest face_id) wins ties
                p[i, t] = True
                best_score[i, t] = score
                best_face[i, t] = records[k].face_id
    return PresenceMatrix(p=p, image_ids=ids, best_face=best_face, best_score=best_score)


def match_faces_to_subjects(records: list[FaceRecord], subjects: list[EnrolledSubject],
                            theta: float = DEFAULT_THETA) -> MatchMatrix:
    descriptors = (np.array([r.descriptor for r in records], dtype=np.float64)
                   if records else np.zeros((0, DESCRIPTOR_DIM)))
    enrolled = (np.array([s.descriptor for s in subjects], dtype=np.float64)
                if subjects else np.zeros((0, DESCRIPTOR_DIM)))
    return match_enrolled(descriptors, enrolled, theta)


def match_triplets(match: MatchMatrix, records: list[FaceRecord]) -> list[dict]:
    """Sparse dump of the match matrix: one triplet per Y=1 cell."""
    out = []
    for k, record in enumerate(records):
        for i in np.nonzero(match.y[k])[0]:
            out.append({
                "face_id": record.face_id,
                "subject_id": int(i),
                "score": float(match.scores[k, i]),
            })
    return out
