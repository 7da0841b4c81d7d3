import math

import numpy as np
import pytest

from facegraph import connectivity, enrollment, ingest
from facegraph.connectivity import ConnectivityConfig

import bruteforce
from conftest import make_face, random_instance

CFG = ConnectivityConfig()


def face_pair(bbox_i, bbox_j, **kw):
    faces = ingest.attach_derived([
        make_face(0, 0, bbox=bbox_i, **{k: v[0] for k, v in kw.items()}),
        make_face(1, 0, bbox=bbox_j, **{k: v[1] for k, v in kw.items()}),
    ])
    return faces[0], faces[1]


class TestClosenessFactor:
    def test_distance_three_scales_gives_quarter(self):
        # equal 100x100 faces, centers 300 apart: d/a = 3 -> (4-3)/4
        f_i, f_j = face_pair((0, 0, 100, 100), (300, 0, 400, 100))
        assert connectivity.closeness_factor(f_i, f_j, CFG) == 0.25

    def test_coincident_centers_give_one(self):
        f_i, f_j = face_pair((0, 0, 100, 100), (0, 0, 100, 100))
        assert connectivity.closeness_factor(f_i, f_j, CFG) == 1.0

    def test_size_gate_zeroes_dissimilar_faces(self):
        # scales 100 vs 50: ratio 0.5 < 0.7 -> 0 even at zero distance
        f_i, f_j = face_pair((0, 0, 100, 100), (25, 25, 75, 75))
        assert f_j.scale == 50.0
        assert connectivity.closeness_factor(f_i, f_j, CFG) == 0.0

    def test_beyond_four_scales_is_zero(self):
        f_i, f_j = face_pair((0, 0, 100, 100), (450, 0, 550, 100))
        assert connectivity.closeness_factor(f_i, f_j, CFG) == 0.0

    def test_exactly_four_scales_is_zero(self):
        f_i, f_j = face_pair((0, 0, 100, 100), (400, 0, 500, 100))
        assert connectivity.closeness_factor(f_i, f_j, CFG) == 0.0

    def test_symmetry(self):
        f_i, f_j = face_pair((0, 0, 100, 90), (120, 30, 230, 130))
        assert (connectivity.closeness_factor(f_i, f_j, CFG)
                == connectivity.closeness_factor(f_j, f_i, CFG))

    def test_literal_gate_flag_inverts(self):
        cfg = ConnectivityConfig(size_gate_literal=True)
        f_i, f_j = face_pair((0, 0, 100, 100), (25, 25, 75, 75))
        assert connectivity.closeness_factor(f_i, f_j, cfg) > 0.0
        same_i, same_j = face_pair((0, 0, 100, 100), (50, 0, 150, 100))
        assert connectivity.closeness_factor(same_i, same_j, cfg) == 0.0


class TestRayIntersection:
    def test_crossing_rays(self):
        s = math.sqrt(2)
        hit = connectivity.ray_intersection((0, 0), (1 / s, 1 / s), (2, 0), (-1 / s, 1 / s))
        assert hit is not None
        point, t1, t2 = hit
        assert point == pytest.approx((1.0, 1.0))
        assert t1 == pytest.approx(s) and t2 == pytest.approx(s)

    def test_parallel_rays_none(self):
        assert connectivity.ray_intersection((0, 0), (1, 0), (0, 5), (1, 0)) is None

    def test_shared_origin(self):
        hit = connectivity.ray_intersection((3, 4), (1, 0), (3, 4), (0, 1))
        point, t1, t2 = hit
        assert point == (3, 4) and t1 == 0 and t2 == 0


class TestConnectionFactor:
    def _gazing_pair(self, scale=1.0):
        # mid-eye points at (0,0) and (2,0); rays meet at (1,1), t1=t2=sqrt(2)
        b = scale / 2
        f_i, f_j = face_pair(
            (-b, -b, b, b), (2 - b, -b, 2 + b, b),
            pose=((1, 1), (-1, 1)),
            eye_point=((0, 0), (2, 0)),
        )
        return f_i, f_j

    def test_crossing_gazes(self):
        f_i, f_j = self._gazing_pair(scale=1.0)
        expected = (4 - math.sqrt(2)) / 4
        assert connectivity.connection_factor(f_i, f_j, CFG) == pytest.approx(expected, abs=1e-12)

    def test_diverging_gazes_zero(self):
        f_i, f_j = face_pair(
            (0, 0, 1, 1), (2, 0, 3, 1),
            pose=((-1, 1), (1, 1)),
            eye_point=((0.5, 0.5), (2.5, 0.5)),
        )
        assert connectivity.connection_factor(f_i, f_j, CFG) == 0.0

    def test_intersection_at_gaze_origin_gives_one(self):
        # j's ray passes through i's mid-eye point: d = 0
        f_i, f_j = face_pair(
            (0, 0, 1, 1), (2, 0, 3, 1),
            pose=((0, 1), (-1, 0)),
            eye_point=((0.5, 0.5), (2.5, 0.5)),
        )
        assert connectivity.connection_factor(f_i, f_j, CFG) == 1.0

    def test_parallel_gazes_zero(self):
        f_i, f_j = face_pair(
            (0, 0, 1, 1), (2, 0, 3, 1),
            pose=((0, 1), (0, 1)),
            eye_point=((0.5, 0.5), (2.5, 0.5)),
        )
        assert connectivity.connection_factor(f_i, f_j, CFG) == 0.0

    def test_no_size_gate_on_connection(self):
        # very dissimilar scales still score when gazes cross
        b = 10.0
        f_i, f_j = face_pair(
            (-0.5, -0.5, 0.5, 0.5), (2 - b, -b, 2 + b, b),
            pose=((1, 1), (-1, 1)),
            eye_point=((0, 0), (2, 0)),
        )
        assert connectivity.connection_factor(f_i, f_j, CFG) > 0.0

    def test_symmetry(self):
        f_i, f_j = self._gazing_pair()
        assert (connectivity.connection_factor(f_i, f_j, CFG)
                == connectivity.connection_factor(f_j, f_i, CFG))


class TestExpressionFactors:
    def test_identical_single_expression(self):
        e = np.array([0, 0, 0, 1.0, 0, 0, 0])
        assert connectivity.empathy_factor(e, e, CFG) == 1.0

    def test_orthogonal_expressions(self):
        angry = np.array([1.0, 0, 0, 0, 0, 0, 0])
        happy = np.array([0, 0, 0, 1.0, 0, 0, 0])
        assert connectivity.empathy_factor(angry, happy, CFG) == 0.0

    def test_half_overlap(self):
        e_i = np.array([0.5, 0, 0, 0.5, 0, 0, 0])
        e_j = np.array([0, 0, 0, 1.0, 0, 0, 0])
        assert connectivity.empathy_factor(e_i, e_j, CFG) == pytest.approx(0.70711, abs=5e-6)

    def test_neutral_is_ignored_and_pure_neutral_scores_zero(self):
        neutral = np.array([0, 0, 0, 0, 0, 0, 1.0])
        happy = np.array([0, 0, 0, 1.0, 0, 0, 0])
        assert connectivity.empathy_factor(neutral, happy, CFG) == 0.0
        assert connectivity.empathy_factor(neutral, neutral, CFG) == 0.0

    def test_happiness_mean(self):
        e_i = np.array([0, 0, 0, 0.8, 0.2, 0, 0])
        e_j = np.array([0, 0, 0, 0.4, 0.6, 0, 0])
        assert connectivity.happiness_factor(e_i, e_j) == pytest.approx(0.6)
        assert connectivity.happiness_factor(e_j, e_i) == pytest.approx(0.6)

    def test_happiness_extremes(self):
        one = np.array([0, 0, 0, 1.0, 0, 0, 0])
        zero = np.array([1.0, 0, 0, 0, 0, 0, 0])
        assert connectivity.happiness_factor(one, one) == 1.0
        assert connectivity.happiness_factor(zero, zero) == 0.0


class TestMatrices:
    def _presence(self, rows, records):
        """rows: n_subjects x n_images booleans; one face per present cell."""
        n_subjects = len(rows)
        n_images = len(rows[0])
        scores = np.zeros((len(records), n_subjects))
        y = np.zeros((len(records), n_subjects), dtype=bool)
        k = 0
        for t in range(n_images):
            for i in range(n_subjects):
                if rows[i][t]:
                    scores[k, i] = 1.0
                    y[k, i] = True
                    k += 1
        match = enrollment.MatchMatrix(scores=scores, y=y, theta=0.4)
        return enrollment.build_presence(match, records, image_ids=range(n_images))

    def test_co_occurrence_counts(self):
        rows = [[1, 1, 0], [1, 0, 1]]
        records = []
        k = 0
        for t in range(3):
            for i in range(2):
                if rows[i][t]:
                    records.append(make_face(k, t))
                    k += 1
        pres = self._presence(rows, records)
        c = connectivity.co_occurrence(pres)
        assert c[0, 1] == 1.0 and c[1, 0] == 1.0
        assert c[0, 0] == 0.0 and c[1, 1] == 0.0

    def test_co_occurrence_identical_and_disjoint(self):
        rows = [[1, 1, 1], [1, 1, 1], [0, 0, 0]]
        records = []
        k = 0
        for t in range(3):
            for i in range(3):
                if rows[i][t]:
                    records.append(make_face(k, t))
                    k += 1
        pres = self._presence(rows, records)
        c = connectivity.co_occurrence(pres)
        assert c[0, 1] == 3.0
        assert c[0, 2] == 0.0 and c[1, 2] == 0.0

    def test_closeness_matrix_sums_factors(self):
        # subjects together in image 0 at d/a = 3 (factor 0.25); image 1 coincident (1.0)
        records = [
            make_face(0, 0, bbox=(0, 0, 100, 100)),
            make_face(1, 0, bbox=(300, 0, 400, 100)),
            make_face(2, 1, bbox=(0, 0, 100, 100)),
            make_face(3, 1, bbox=(0, 0, 100, 100)),
        ]
        pres = self._presence([[1, 1], [1, 1]], records)
        d = connectivity.closeness_matrix(pres, ingest.attach_derived(records), CFG)
        assert d[0, 1] == pytest.approx(1.25, abs=1e-12)

    def test_total_connectivity_mean_and_weights(self):
        mats = [np.array([[0.0, v], [v, 0.0]]) for v in (5.0, 1.0, 0.5, 2.0, 1.5)]
        t = connectivity.total_connectivity(*mats, CFG)
        assert t[0, 1] == pytest.approx(2.0)
        only_c = connectivity.total_connectivity(
            *mats, ConnectivityConfig(weights=(1, 0, 0, 0, 0)))
        assert only_c[0, 1] == 5.0
        zeros = [np.zeros((2, 2))] * 5
        assert connectivity.total_connectivity(*zeros, CFG).sum() == 0.0

    def test_all_zero_weights_fatal(self):
        with pytest.raises(ValueError):
            ConnectivityConfig(weights=(0, 0, 0, 0, 0))


class TestBundleAgainstBruteForce:
    @pytest.mark.parametrize("seed", range(6))
    def test_oracle_reproduces_matrices_exactly(self, seed):
        rng = np.random.default_rng(100 + seed)
        n_subjects = int(rng.integers(2, 5))
        n_images = int(rng.integers(1, 6))
        records, faces, presence, membership = random_instance(rng, n_subjects, n_images)
        bundle = connectivity.compute_bundle(presence, faces, CFG)
        oc, od, oz, oe, oh = bruteforce.matrices(records, membership, n_subjects, n_images)
        np.testing.assert_array_equal(bundle.c, np.array(oc))
        np.testing.assert_array_equal(bundle.d, np.array(od))
        np.testing.assert_array_equal(bundle.z, np.array(oz))
        np.testing.assert_array_equal(bundle.e, np.array(oe))
        np.testing.assert_array_equal(bundle.h, np.array(oh))

    def test_bundle_invariants(self):
        rng = np.random.default_rng(55)
        _, faces, presence, _ = random_instance(rng, 5, 12)
        bundle = connectivity.compute_bundle(presence, faces, CFG)
        for name, m in bundle.matrices().items():
            assert np.array_equal(m, m.T), name
            assert (np.diag(m) == 0).all(), name
            assert (m >= 0).all(), name
        assert np.array_equal(bundle.c, np.round(bundle.c))
        for m in (bundle.d, bundle.z, bundle.e, bundle.h):
            assert (m <= bundle.c + 1e-12).all()

    def test_input_order_invariance(self):
        rng = np.random.default_rng(77)
        records, faces, presence, membership = random_instance(rng, 4, 8)
        bundle = connectivity.compute_bundle(presence, faces, CFG)

        rng2 = np.random.default_rng(78)
        perm = rng2.permutation(len(records))
        records_p = [records[int(k)] for k in perm]
        scores = np.zeros((len(records_p), 4))
        y = np.zeros((len(records_p), 4), dtype=bool)
        by_face = {fid: i for (i, t), fid in membership.items()}
        for k, rec in enumerate(records_p):
            scores[k, by_face[rec.face_id]] = 1.0
            y[k, by_face[rec.face_id]] = True
        match = enrollment.MatchMatrix(scores=scores, y=y, theta=0.4)
        presence_p = enrollment.build_presence(match, records_p, image_ids=range(8))
        bundle_p = connectivity.compute_bundle(presence_p, ingest.attach_derived(records_p), CFG)
        for name in ("c", "d", "z", "e", "h", "t"):
            np.testing.assert_array_equal(getattr(bundle, name), getattr(bundle_p, name))

    def test_subject_permutation_conjugates_matrices(self):
        rng = np.random.default_rng(88)
        records, faces, presence, membership = random_instance(rng, 4, 8)
        bundle = connectivity.compute_bundle(presence, faces, CFG)

        perm = [2, 0, 3, 1]  # new index of each old subject
        scores = np.zeros((len(records), 4))
        y = np.zeros((len(records), 4), dtype=bool)
        by_face = {fid: i for (i, t), fid in membership.items()}
        for k, rec in enumerate(records):
            i_new = perm[by_face[rec.face_id]]
            scores[k, i_new] = 1.0
            y[k, i_new] = True
        match = enrollment.MatchMatrix(scores=scores, y=y, theta=0.4)
        presence_p = enrollment.build_presence(match, records, image_ids=range(8))
        bundle_p = connectivity.compute_bundle(presence_p, faces, CFG)

        p_mat = np.zeros((4, 4))
        for old, new in enumerate(perm):
            p_mat[new, old] = 1.0
        for name in ("c", "d", "z", "e", "h", "t"):
            expected = p_mat @ getattr(bundle, name) @ p_mat.T
            np.testing.assert_allclose(getattr(bundle_p, name), expected, atol=1e-12)

    def test_pair_image_lists(self):
        rng = np.random.default_rng(99)
        _, faces, presence, membership = random_instance(rng, 3, 6)
        bundle = connectivity.compute_bundle(presence, faces, CFG)
        for (i, j), ids in bundle.pair_images.items():
            assert i < j
            expected = sorted(t for t in range(6)
                              if (i, t) in membership and (j, t) in membership)
            assert list(ids) == expected
            assert len(ids) == bundle.c[i, j]
