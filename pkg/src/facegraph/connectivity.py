"""Pairwise subject connectivity: co-occurrence, closeness, mutual gaze,
expression similarity and joint happiness, plus their weighted average.

All five matrices are n_e x n_e, symmetric, nonnegative, with zero diagonal.
Per-image factors lie in [0, 1] and only images where both subjects appear
contribute, so each factor matrix is elementwise bounded by the co-occurrence
count matrix.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .enrollment import PresenceMatrix
from .ingest import Face, HAPPY_INDEX

RAY_PARALLEL_EPS = 1e-9


@dataclass(frozen=True)
class ConnectivityConfig:
    n_f: float = 4.0                    # closeness/gaze ramp cutoff, in face scales
    size_similarity_min: float = 0.7    # min face-scale ratio for the closeness gate
    weights: tuple[float, float, float, float, float] = (1.0, 1.0, 1.0, 1.0, 1.0)
    epsilon_norm: float = 1e-9          # below this, truncated expression vectors count as zero
    # keep the published inequality direction (ratio < min) instead of the
    # corrected gate (ratio >= min); off by default, see README
    size_gate_literal: bool = False

    def __post_init__(self):
        if not self.n_f > 0:
            raise ValueError(f"n_f must be positive, got {self.n_f}")
        if len(self.weights) != 5 or any(w < 0 for w in self.weights):
            raise ValueError("weights must be five nonnegative values")
        if not any(w > 0 for w in self.weights):
            raise ValueError("weights must not all be zero")


@dataclass(frozen=True, eq=False)
class ConnectivityBundle:
    c: np.ndarray  # co-occurrence counts
    d: np.ndarray  # closeness
    z: np.ndarray  # mutual gaze ("connection")
    e: np.ndarray  # expression similarity ("empathy")
    h: np.ndarray  # joint happiness
    t: np.ndarray  # weighted mean of the five
    config: ConnectivityConfig
    pair_images: dict = field(default_factory=dict)  # (i, j) i<j -> tuple of image_ids

    def matrices(self) -> dict[str, np.ndarray]:
        return {"C": self.c, "D": self.d, "Z": self.z, "E": self.e, "H": self.h, "T": self.t}


def co_occurrence(presence: PresenceMatrix) -> np.ndarray:
    """C[i, j] = number of images where subjects i and j both appear."""
    p = presence.p.astype(np.float64)
    c = p @ p.T
    np.fill_diagonal(c, 0.0)
    return c


def closeness_factor(face_i: Face, face_j: Face, cfg: ConnectivityConfig) -> float:
    """Ramp (n_f - d/a)/n_f on the bbox-center distance, gated by size similarity.

    a is the mean of the two face scales. Faces of dissimilar scale are likely
    at different depths, so they score 0 regardless of image distance.
    """
    a_i, a_j = face_i.scale, face_j.scale
    ratio = min(a_i / a_j, a_j / a_i)
    if cfg.size_gate_literal:
        if not ratio < cfg.size_similarity_min:
            return 0.0
    elif not ratio >= cfg.size_similarity_min:
        return 0.0
    a = (a_i + a_j) / 2.0
    d = math.dist(face_i.center, face_j.center)
    return _ramp(d / a, cfg.n_f)


def _ramp(d_over_a: float, n_f: float) -> float:
    if d_over_a < n_f:
        return (n_f - d_over_a) / n_f
    return 0.0


def ray_intersection(o1, v1, o2, v2):
    """Intersect rays o1 + t1*v1 and o2 + t2*v2 in the plane.

    Returns (point, t1, t2) for a nonsingular system; None for (near-)parallel
    directions. Callers decide what negative parameters mean.
    """
    cross = v1[0] * v2[1] - v1[1] * v2[0]
    if abs(cross) <= RAY_PARALLEL_EPS:
        return None
    dx = o2[0] - o1[0]
    dy = o2[1] - o1[1]
    t1 = (dx * v2[1] - dy * v2[0]) / cross
    t2 = (dx * v1[1] - dy * v1[0]) / cross
    point = (o1[0] + t1 * v1[0], o1[1] + t1 * v1[1])
    return point, t1, t2


def connection_factor(face_i: Face, face_j: Face, cfg: ConnectivityConfig) -> float:
    """Mutual-gaze score: same ramp applied to the distance from the gaze-ray
    intersection to the nearer mid-eye point.

    The rays start at each face's mid-eye point along its head direction. An
    intersection behind either face (negative ray parameter) scores 0.
    """
    hit = ray_intersection(face_i.gaze_origin, face_i.pose, face_j.gaze_origin, face_j.pose)
    if hit is None:
        return 0.0
    _, t1, t2 = hit
    if t1 < 0.0 or t2 < 0.0:
        return 0.0
    d = min(t1, t2)
    a = (face_i.scale + face_j.scale) / 2.0
    return _ramp(d / a, cfg.n_f)


def empathy_factor(e_i: np.ndarray, e_j: np.ndarray, cfg: ConnectivityConfig) -> float:
    """Cosine similarity of the expression vectors with neutral dropped.

    A face that is purely neutral has a zero truncated vector; the cosine is
    undefined there and the factor is 0.
    """
    a = [float(v) for v in e_i[:6]]
    b = [float(v) for v in e_j[:6]]
    na = math.sqrt(sum(v * v for v in a))
    nb = math.sqrt(sum(v * v for v in b))
    if na < cfg.epsilon_norm or nb < cfg.epsilon_norm:
        return 0.0
    dot = sum(x * y for x, y in zip(a, b))
    return min(1.0, dot / (na * nb))


def happiness_factor(e_i: np.ndarray, e_j: np.ndarray) -> float:
    """Mean of the two faces' happy probabilities."""
    return (float(e_i[HAPPY_INDEX]) + float(e_j[HAPPY_INDEX])) / 2.0


def _pairwise_sum(presence: PresenceMatrix, faces: dict[int, Face], factor) -> np.ndarray:
    """Sum a per-image pair factor over co-occurring images.

    Images are visited in ascending image_id order so float sums are
    bit-reproducible regardless of input order.
    """
    n_e = presence.n_subjects
    out = np.zeros((n_e, n_e), dtype=np.float64)
    for t in range(presence.n_images):
        present = np.nonzero(presence.p[:, t])[0]
        for ai in range(len(present)):
            for bj in range(ai + 1, len(present)):
                i, j = int(present[ai]), int(present[bj])
                f = factor(faces[int(presence.best_face[i, t])],
                           faces[int(presence.best_face[j, t])])
                out[i, j] += f
                out[j, i] += f
    return out


def closeness_matrix(presence: PresenceMatrix, faces: dict[int, Face],
                     cfg: ConnectivityConfig) -> np.ndarray:
    return _pairwise_sum(presence, faces, lambda a, b: closeness_factor(a, b, cfg))


def connection_matrix(presence: PresenceMatrix, faces: dict[int, Face],
                      cfg: ConnectivityConfig) -> np.ndarray:
    return _pairwise_sum(presence, faces, lambda a, b: connection_factor(a, b, cfg))


def empathy_matrix(presence: PresenceMatrix, faces: dict[int, Face],
                   cfg: ConnectivityConfig) -> np.ndarray:
    return _pairwise_sum(presence, faces,
                         lambda a, b: empathy_factor(a.expression, b.expression, cfg))


def happiness_matrix(presence: PresenceMatrix, faces: dict[int, Face],
                     cfg: ConnectivityConfig) -> np.ndarray:
    return _pairwise_sum(presence, faces,
                         lambda a, b: happiness_factor(a.expression, b.expression))


def total_connectivity(c, d, z, e, h, cfg: ConnectivityConfig) -> np.ndarray:
    """Weighted mean of the five matrices; uniform weights give the plain mean."""
    w = np.asarray(cfg.weights, dtype=np.float64)
    total = w.sum()
    if not total > 0:
        raise ValueError("weights must not all be zero")
    return (w[0] * c + w[1] * d + w[2] * z + w[3] * e + w[4] * h) / total


def pair_image_lists(presence: PresenceMatrix) -> dict[tuple[int, int], tuple[int, ...]]:
    """For each pair (i < j): the image_ids where both subjects appear."""
    out: dict[tuple[int, int], tuple[int, ...]] = {}
    n_e = presence.n_subjects
    for i in range(n_e):
        for j in range(i + 1, n_e):
            both = presence.p[i] & presence.p[j]
            if both.any():
                out[(i, j)] = tuple(int(t) for t in presence.image_ids[both])
    return out


def compute_bundle(presence: PresenceMatrix, faces: dict[int, Face],
                   cfg: ConnectivityConfig | None = None) -> ConnectivityBundle:
    """Compute all five connectivity matrices, their weighted mean and the
    per-pair co-occurrence image lists."""
    cfg = cfg or ConnectivityConfig()
    c = co_occurrence(presence)
    d = closeness_matrix(presence, faces, cfg)
    z = connection_matrix(presence, faces, cfg)
    e = empathy_matrix(presence, faces, cfg)
    h = happiness_matrix(presence, faces, cfg)
    t = total_connectivity(c, d, z, e, h, cfg)
    return ConnectivityBundle(c=c, d=d, z=z, e=e, h=h, t=t, config=cfg,
                              pair_images=pair_image_lists(presence))
