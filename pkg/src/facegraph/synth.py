"""Synthetic planted-community fixtures for desk-scale testing.

Subjects are split into groups; each synthetic image shows one full group
placed close together with similar face scales, so within-group connectivity
is strong and cross-group connectivity is exactly zero. Descriptors are a
fixed random unit template per subject plus bounded noise, which keeps
identity matching unambiguous at the default threshold.
"""

import json

import numpy as np

from .ingest import DESCRIPTOR_DIM, EXPRESSION_LABELS

IMAGE_W = 1920
IMAGE_H = 1080
BASE_SCALE = 80.0

# dominant expression index per group, cycled: happy, sad, angry, surprised, ...
GROUP_MOODS = (3, 4, 0, 5, 2, 1, 6)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _landmarks(x1, y1, x2, y2) -> list[list[float]]:
    """Procedural 68-point layout inside the bbox (standard region order)."""
    w, h = x2 - x1, y2 - y1
    cx = (x1 + x2) / 2
    pts = []
    for k in range(17):  # jaw 0-16
        frac = k / 16
        pts.append([x1 + frac * w, y1 + h * (0.55 + 0.4 * np.sin(np.pi * frac))])
    for k in range(10):  # brows 17-26
        pts.append([x1 + (0.15 + 0.07 * k) * w, y1 + 0.25 * h])
    for k in range(9):   # nose 27-35
        pts.append([cx, y1 + (0.35 + 0.03 * k) * h])
    for k in range(6):   # left eye 36-41
        ang = 2 * np.pi * k / 6
        pts.append([x1 + 0.3 * w + 0.05 * w * np.cos(ang), y1 + 0.4 * h + 0.02 * h * np.sin(ang)])
    for k in range(6):   # right eye 42-47
        ang = 2 * np.pi * k / 6
        pts.append([x1 + 0.7 * w + 0.05 * w * np.cos(ang), y1 + 0.4 * h + 0.02 * h * np.sin(ang)])
    for k in range(20):  # mouth 48-67
        ang = 2 * np.pi * k / 20
        pts.append([cx + 0.15 * w * np.cos(ang), y1 + 0.75 * h + 0.05 * h * np.sin(ang)])
    return [[float(x), float(y)] for x, y in pts]


def generate(n_subjects: int, n_images: int, n_groups: int, seed: int,
             noise: float = 0.1) -> tuple[list[dict], list[dict], dict]:
    """Build (face record objects, enrolled objects, ground truth).

    Deterministic for a given seed. Ground truth records the group of every
    subject and the member list of every image.
    """
    if n_groups < 1 or n_groups > n_subjects:
        raise ValueError(f"need 1 <= n_groups <= n_subjects, got {n_groups}/{n_subjects}")
    rng = np.random.default_rng(seed)

    groups = [s * n_groups // n_subjects for s in range(n_subjects)]
    members = {g: [s for s in range(n_subjects) if groups[s] == g] for g in range(n_groups)}
    templates = [_unit(rng.standard_normal(DESCRIPTOR_DIM)) for _ in range(n_subjects)]
    ages = rng.uniform(18, 70, n_subjects)
    genders = rng.choice(["female", "male"], n_subjects)

    mood_base = []
    for g in range(n_groups):
        base = np.full(len(EXPRESSION_LABELS), 0.03)
        base[GROUP_MOODS[g % len(GROUP_MOODS)]] = 0.8
        mood_base.append(base / base.sum())

    faces: list[dict] = []
    gt_images: list[dict] = []
    first_face: dict[int, int] = {}
    face_id = 0
    for t in range(n_images):
        g = int(rng.integers(n_groups))
        group_members = members[g]
        k_faces = len(group_members)
        cluster_cx = rng.uniform(IMAGE_W * 0.3, IMAGE_W * 0.7)
        cluster_cy = rng.uniform(IMAGE_H * 0.35, IMAGE_H * 0.65)

        scales = BASE_SCALE * (1 + rng.uniform(-0.1, 0.1, k_faces))
        # spread members on a line so neighbors sit well under the 4a cutoff
        spacing = 2.0 * BASE_SCALE
        xs = cluster_cx + (np.arange(k_faces) - (k_faces - 1) / 2) * spacing
        ys = cluster_cy + rng.uniform(-0.2 * BASE_SCALE, 0.2 * BASE_SCALE, k_faces)

        entries = []
        for p, s in enumerate(group_members):
            scale = scales[p]
            aspect = 1 + rng.uniform(-0.05, 0.05)
            w = scale * aspect
            h = scale / aspect
            x1, y1 = xs[p] - w / 2, ys[p] - h / 2
            bbox = [float(x1), float(y1), float(x1 + w), float(y1 + h)]
            gaze = (xs[p], ys[p] - 0.1 * h)  # approximate mid-eye point
            entries.append({"subject": s, "bbox": bbox, "gaze": gaze, "scale": scale})

        # pair members up; each pair looks at each other with probability 0.5
        order = rng.permutation(k_faces)
        poses = [None] * k_faces
        for a in range(0, k_faces - 1, 2):
            pa, pb = int(order[a]), int(order[a + 1])
            if rng.random() < 0.5:
                v = np.array(entries[pb]["gaze"]) - np.array(entries[pa]["gaze"])
                poses[pa] = _unit(v)
                poses[pb] = _unit(-v)
        for p in range(k_faces):
            if poses[p] is None:
                poses[p] = _unit(rng.standard_normal(2))

        for p, entry in enumerate(entries):
            s = entry["subject"]
            expr = rng.dirichlet(mood_base[g] * 60)
            noise_vec = rng.standard_normal(DESCRIPTOR_DIM)
            noise_vec *= rng.uniform(0, noise) / np.linalg.norm(noise_vec)
            descriptor = _unit(templates[s] + noise_vec)
            x1, y1, x2, y2 = entry["bbox"]
            faces.append({
                "face_id": face_id,
                "image_id": t,
                "bbox": entry["bbox"],
                "landmarks": _landmarks(x1, y1, x2, y2),
                "pose": [float(poses[p][0]), float(poses[p][1])],
                "expression": [float(v) for v in expr],
                "age": float(np.clip(ages[s] + rng.uniform(-2, 2), 0, None)),
                "gender": {"label": str(genders[s]), "confidence": 0.9},
                "descriptor": [float(v) for v in descriptor],
            })
            first_face.setdefault(s, face_id)
            face_id += 1
        gt_images.append({"image_id": t, "members": list(group_members)})

    enrolled = [{
        "subject_id": s,
        "name": f"S{s:02d}",
        "descriptor": [float(v) for v in templates[s]],
        "face_id": first_face.get(s),
    } for s in range(n_subjects)]

    ground_truth = {
        "groups": {str(s): groups[s] for s in range(n_subjects)},
        "images": gt_images,
    }
    return faces, enrolled, ground_truth


def write_fixture(out_dir, n_subjects: int, n_images: int, n_groups: int,
                  seed: int, noise: float = 0.1) -> dict:
    """Write faces.jsonl, enrolled.jsonl and ground_truth.json into out_dir."""
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    faces, enrolled, ground_truth = generate(n_subjects, n_images, n_groups, seed, noise)
    with open(out / "faces.jsonl", "w") as fh:
        for obj in faces:
            fh.write(json.dumps(obj) + "\n")
    with open(out / "enrolled.jsonl", "w") as fh:
        for obj in enrolled:
            fh.write(json.dumps(obj) + "\n")
    with open(out / "ground_truth.json", "w") as fh:
        json.dump(ground_truth, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return ground_truth
