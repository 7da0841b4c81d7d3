import numpy as np
import pytest

from facegraph import enrollment, ingest


def make_face(face_id, image_id, *, bbox=(0.0, 0.0, 100.0, 100.0),
              pose=(1.0, 0.0), expression=None, eye_point=None,
              age=30.0, gender="female", descriptor=None) -> ingest.FaceRecord:
    """Build a valid FaceRecord directly, skipping file parsing."""
    x1, y1, x2, y2 = bbox
    if eye_point is None:
        eye_point = ((x1 + x2) / 2, y1 + 0.4 * (y2 - y1))
    landmarks = np.tile(np.asarray(eye_point, dtype=np.float64), (68, 1))
    if expression is None:
        expression = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]
    if descriptor is None:
        descriptor = np.zeros(ingest.DESCRIPTOR_DIM)
        descriptor[face_id % ingest.DESCRIPTOR_DIM] = 1.0
    pose = np.asarray(pose, dtype=np.float64)
    return ingest.FaceRecord(
        face_id=face_id,
        image_id=image_id,
        bbox=tuple(float(v) for v in bbox),
        landmarks=landmarks,
        pose_direction=pose / np.linalg.norm(pose),
        expression=np.asarray(expression, dtype=np.float64),
        age=age,
        gender=gender,
        gender_confidence=0.9,
        descriptor=np.asarray(descriptor, dtype=np.float64),
    )


def random_face(rng, face_id, image_id) -> ingest.FaceRecord:
    w = rng.uniform(40, 160)
    h = rng.uniform(40, 160)
    cx = rng.uniform(100, 1820)
    cy = rng.uniform(100, 980)
    bbox = (cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2)
    if rng.random() < 0.1:
        expression = [0.0] * 6 + [1.0]  # pure neutral: empathy must be 0
    else:
        expression = rng.dirichlet(np.ones(7)).tolist()
    pose = rng.standard_normal(2)
    eye_point = (cx + rng.uniform(-w / 4, w / 4), cy + rng.uniform(-h / 4, h / 4))
    return make_face(face_id, image_id, bbox=bbox, pose=pose,
                     expression=expression, eye_point=eye_point,
                     age=float(rng.uniform(10, 80)),
                     gender=str(rng.choice(["female", "male"])))


def random_instance(rng, n_subjects, n_images, p_present=0.45):
    """Random membership instance: one face per (present subject, image).

    Returns (records, faces, presence, membership) where membership maps
    (subject_id, image_id) -> face_id.
    """
    records = []
    membership = {}
    face_id = 0
    for t in range(n_images):
        for i in range(n_subjects):
            if rng.random() < p_present:
                records.append(random_face(rng, face_id, t))
                membership[(i, t)] = face_id
                face_id += 1
    scores = np.zeros((len(records), n_subjects))
    y = np.zeros((len(records), n_subjects), dtype=bool)
    by_face = {fid: i for (i, t), fid in membership.items()}
    for k, rec in enumerate(records):
        i = by_face[rec.face_id]
        scores[k, i] = 1.0
        y[k, i] = True
    match = enrollment.MatchMatrix(scores=scores, y=y, theta=0.4)
    presence = enrollment.build_presence(match, records, image_ids=range(n_images))
    faces = ingest.attach_derived(records)
    return records, faces, presence, membership


@pytest.fixture(scope="session")
def planted_fixture(tmp_path_factory):
    """The planted-community fixture used by the end-to-end and service tests."""
    from facegraph import synth

    out = tmp_path_factory.mktemp("fixture")
    ground_truth = synth.write_fixture(out, n_subjects=8, n_images=200, n_groups=2, seed=7)
    return out, ground_truth


@pytest.fixture(scope="session")
def planted_analysis(planted_fixture, tmp_path_factory):
    from facegraph import pipeline

    fixture_dir, ground_truth = planted_fixture
    out = tmp_path_factory.mktemp("analysis")
    cfg = pipeline.RunConfig(
        faces_path=fixture_dir / "faces.jsonl",
        enrolled_path=fixture_dir / "enrolled.jsonl",
        out_dir=out,
        seed=42,
    )
    result = pipeline.analyze(cfg)
    paths = pipeline.write_outputs(result, cfg)
    return result, paths, ground_truth


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            if "test_acceptance" in rep.nodeid and rep.when == "call":
                name = rep.nodeid.split("::")[-1]
                lines.append((name, status == "passed"))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, ok in lines:
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
