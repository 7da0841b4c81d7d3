"""Acceptance suite: one test per criterion, each with its stated tolerance.

The terminal summary (see conftest) prints one PASS/FAIL line per criterion.
"""

import json
import math
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from facegraph import connectivity, ingest, pipeline, service
from facegraph.connectivity import ConnectivityConfig
from facegraph.layout import force_directed_init, no_connectivity, solve_layout, stress
from facegraph.simplex import nelder_mead

import bruteforce
from conftest import make_face, random_instance


def _pair(bbox_i, bbox_j):
    faces = ingest.attach_derived([make_face(0, 0, bbox=bbox_i),
                                   make_face(1, 0, bbox=bbox_j)])
    return faces[0], faces[1]


def test_closeness_factor_anchors():
    cfg = ConnectivityConfig()
    # equal 100-pixel scales, centers 3 scales apart
    f_i, f_j = _pair((0, 0, 100, 100), (300, 0, 400, 100))
    assert abs(connectivity.closeness_factor(f_i, f_j, cfg) - 0.25) <= 1e-12

    # beyond four face scales: exactly zero
    f_i, f_j = _pair((0, 0, 100, 100), (401, 0, 501, 100))
    assert connectivity.closeness_factor(f_i, f_j, cfg) == 0.0


def test_w_transform_anchors():
    start = time.monotonic()
    t = np.array([[0.0, 5.0, 0.0], [5.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    w = no_connectivity(t).w
    assert abs(w[0, 1] - 0.1) <= 1e-9
    assert abs(w[0, 2] - 1.0) <= 1e-9

    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(2, 9))
        raw = rng.uniform(0, rng.uniform(0.5, 50), (n, n))
        t = (raw + raw.T) / 2
        np.fill_diagonal(t, 0.0)
        w = no_connectivity(t).w
        off = ~np.eye(n, dtype=bool)
        assert (w[off] >= 0.1 - 1e-9).all()
        assert (w[off] <= 1.0 + 1e-9).all()
    assert time.monotonic() - start < 1.0


def test_matrix_property_suite():
    start = time.monotonic()
    cfg = ConnectivityConfig()
    for seed in range(50):
        rng = np.random.default_rng(7000 + seed)
        n_subjects = int(rng.integers(2, 7))
        n_images = int(rng.integers(1, 31))
        records, faces, presence, membership = random_instance(rng, n_subjects, n_images)
        bundle = connectivity.compute_bundle(presence, faces, cfg)

        for name, m in bundle.matrices().items():
            assert np.array_equal(m, m.T), f"seed {seed}: {name} not symmetric"
            assert (np.diag(m) == 0).all(), f"seed {seed}: {name} diagonal"
            assert (m >= 0).all(), f"seed {seed}: {name} negative"
        assert np.array_equal(bundle.c, np.round(bundle.c)), f"seed {seed}: C not integer"
        for name, m in (("D", bundle.d), ("Z", bundle.z), ("E", bundle.e), ("H", bundle.h)):
            assert (m <= bundle.c).all(), f"seed {seed}: {name} exceeds C"

        oc, od, oz, oe, oh = bruteforce.matrices(records, membership, n_subjects, n_images)
        np.testing.assert_array_equal(bundle.c, np.array(oc), err_msg=f"seed {seed}: C")
        np.testing.assert_array_equal(bundle.d, np.array(od), err_msg=f"seed {seed}: D")
        np.testing.assert_array_equal(bundle.z, np.array(oz), err_msg=f"seed {seed}: Z")
        np.testing.assert_array_equal(bundle.e, np.array(oe), err_msg=f"seed {seed}: E")
        np.testing.assert_array_equal(bundle.h, np.array(oh), err_msg=f"seed {seed}: H")
    assert time.monotonic() - start < 10.0


def test_solver_suite():
    start = time.monotonic()
    quad = nelder_mead(lambda x: float(((x - np.array([3.0, -2.0])) ** 2).sum()), np.zeros(2))
    assert np.abs(quad.x - [3.0, -2.0]).max() < 1e-6
    assert (np.diff(quad.trace) <= 0).all()

    rosen = nelder_mead(lambda x: (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2,
                        np.array([-1.2, 1.0]))
    assert np.abs(rosen.x - [1.0, 1.0]).max() < 1e-4
    assert (np.diff(rosen.trace) <= 0).all()

    rng = np.random.default_rng(99)
    for _ in range(10):
        x0 = rng.uniform(-3, 3, 5)
        r = nelder_mead(lambda x: float(np.abs(x).sum() + (x ** 2).sum()), x0)
        assert (np.diff(r.trace) <= 0).all()
    assert time.monotonic() - start < 5.0


def test_exact_embedding_layouts():
    start = time.monotonic()
    w3 = np.full((3, 3), 0.5)
    np.fill_diagonal(w3, 0.0)
    lay3 = solve_layout(w3)
    assert lay3.stress < 1e-8
    assert lay3.mae < 1e-4

    rng = np.random.default_rng(4242)
    for w12 in rng.uniform(0.1, 1.0, 5):
        w2 = np.array([[0.0, w12], [w12, 0.0]])
        assert solve_layout(w2).mae < 1e-6

    for trial in range(20):
        n = int(rng.integers(2, 7))
        raw = rng.uniform(0, 4, (n, n))
        t = (raw + raw.T) / 2
        np.fill_diagonal(t, 0.0)
        w = no_connectivity(t).w
        init_stress = stress(force_directed_init(w, seed=42), w)
        assert solve_layout(w).stress <= init_stress + 1e-12
    assert time.monotonic() - start < 10.0


def test_planted_cluster_end_to_end(planted_analysis):
    start = time.monotonic()
    result, paths, ground_truth = planted_analysis

    groups = {int(k): v for k, v in ground_truth["groups"].items()}
    expected = set()
    for img in ground_truth["images"]:
        for member in img["members"]:
            expected.add((member, img["image_id"]))
    recovered = set()
    pres = result.presence
    for i in range(pres.n_subjects):
        for t in range(pres.n_images):
            if pres.p[i, t]:
                recovered.add((i, int(pres.image_ids[t])))
    assert recovered == expected, "presence must equal planted ground truth exactly"

    pos = result.layout.positions
    intra, inter = [], []
    n = pres.n_subjects
    for i in range(n):
        for j in range(i + 1, n):
            d = float(np.linalg.norm(pos[i] - pos[j]))
            (intra if groups[i] == groups[j] else inter).append(d)
    assert np.mean(intra) < np.mean(inter)
    assert math.isfinite(result.layout.mae)
    assert time.monotonic() - start < 30.0


def test_determinism_byte_identical(planted_fixture, tmp_path):
    fixture_dir, _ = planted_fixture
    outputs = []
    for sub in ("one", "two"):
        cfg = pipeline.RunConfig(
            faces_path=fixture_dir / "faces.jsonl",
            enrolled_path=fixture_dir / "enrolled.jsonl",
            out_dir=tmp_path / sub,
            seed=42,
        )
        paths = pipeline.write_outputs(pipeline.analyze(cfg), cfg)
        outputs.append(paths)
    assert outputs[0]["graph"].read_bytes() == outputs[1]["graph"].read_bytes()
    assert outputs[0]["svg"].read_bytes() == outputs[1]["svg"].read_bytes()


def test_service_contract(planted_analysis):
    _, paths, _ = planted_analysis
    state = service.load_state(paths["graph"])
    client = TestClient(service.create_app(state))

    graph = client.get("/api/graph")
    assert graph.status_code == 200
    assert graph.content == paths["graph"].read_bytes()
    doc = graph.json()
    assert set(doc) == {"metadata", "nodes", "edges"}

    subject = client.get("/api/subjects/0")
    assert subject.status_code == 200
    body = subject.json()
    assert set(body) >= {"subject_id", "name", "image_count", "gender",
                         "mean_age", "expression_stats", "neighbors"}
    assert len(body["expression_stats"]["histogram"]) == 7

    images = client.get("/api/subjects/0/images", params={"sort_by": "happy"})
    assert images.status_code == 200
    scores = [item["score"] for item in images.json()]
    assert scores == sorted(scores, reverse=True)

    edge = doc["edges"][0]
    a = client.get(f"/api/edges/{edge['i']}/{edge['j']}")
    b = client.get(f"/api/edges/{edge['j']}/{edge['i']}")
    assert a.status_code == 200 and a.content == b.content
    assert set(a.json()["breakdown"]) == {"C", "D", "Z", "E", "H", "T"}
    tiles = client.get(f"/api/edges/{edge['i']}/{edge['j']}/images")
    assert len(tiles.json()) == edge["co_image_count"]

    assert client.get("/api/subjects/999").status_code == 404
    assert client.get("/api/edges/0/999").status_code == 404
    assert client.get("/api/edges/1/1").status_code == 400
    assert client.get("/api/subjects/0/images",
                      params={"sort_by": "nope"}).status_code == 400
