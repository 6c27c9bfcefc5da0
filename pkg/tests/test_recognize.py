import numpy as np
import pytest

from repel2d.embed_2d import MatrixDataset, ProjectorPair, method_matrices, fit_orthonormal
from repel2d.errors import ParameterError, ShapeError
from repel2d.recognize import (
    GallerySet,
    build_gallery,
    classify_1nn,
    classify_batch,
    error_rate,
    project,
    project_tensor,
)
from repel2d.tensor_core import Tensor3


def identity_pair(m1, m2):
    return ProjectorPair(np.eye(m1), np.eye(m2))


class TestProject:
    def test_identity(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(4, 3))
        np.testing.assert_array_equal(project(x, identity_pair(4, 3)), x)

    def test_training_slice_reproduced(self):
        rng = np.random.default_rng(1)
        labels = np.repeat([0, 1], 5)
        ds = MatrixDataset(Tensor3(rng.normal(size=(5, 4, 10))), labels)
        spec = method_matrices("2D-PCA", ds)
        pair, _ = fit_orthonormal(ds.tensor, spec, 2, 2)
        stack = project_tensor(ds.tensor, pair)
        for k in (0, 3, 9):
            np.testing.assert_array_equal(
                project(ds.tensor.frontal_slice(k), pair), stack.frontal_slice(k)
            )

    def test_rank_one_in_span_keeps_norm(self):
        rng = np.random.default_rng(2)
        u_full = np.linalg.qr(rng.normal(size=(5, 2)))[0]
        v_full = np.linalg.qr(rng.normal(size=(4, 2)))[0]
        pair = ProjectorPair(u_full, v_full)
        x = np.outer(u_full[:, 0], v_full[:, 1]) * 3.0
        y = project(x, pair)
        assert np.linalg.norm(y) == pytest.approx(np.linalg.norm(x), rel=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            project(np.ones((3, 3)), identity_pair(4, 3))


class TestClassify:
    def gallery(self, items, labels):
        return GallerySet(Tensor3.stack_frontal(items), np.asarray(labels))

    def test_exact_match(self):
        items = [np.eye(2), np.ones((2, 2))]
        g = self.gallery(items, [5, 9])
        assert classify_1nn(np.ones((2, 2)), g) == 9

    def test_closer_second(self):
        items = [np.zeros((2, 2)), np.full((2, 2), 2.0)]
        g = self.gallery(items, [0, 1])
        assert classify_1nn(np.full((2, 2), 1.5), g) == 1

    def test_five_item_distance_oracle(self):
        rng = np.random.default_rng(3)
        items = [rng.normal(size=(3, 2)) for _ in range(5)]
        labels = [10, 11, 12, 13, 14]
        g = self.gallery(items, labels)
        query = rng.normal(size=(3, 2))
        distances = [np.linalg.norm(query - item) for item in items]
        assert classify_1nn(query, g) == labels[int(np.argmin(distances))]

    def test_tie_breaks_to_lowest_index(self):
        items = [np.zeros((2, 2)), np.zeros((2, 2))]
        g = self.gallery(items, [3, 7])
        assert classify_1nn(np.zeros((2, 2)), g) == 3

    def test_empty_gallery_rejected(self):
        with pytest.raises((ParameterError, ShapeError)):
            GallerySet(Tensor3(np.zeros((2, 2, 1))), np.array([], dtype=int))

    def test_rotation_invariance(self):
        rng = np.random.default_rng(4)
        items = [rng.normal(size=(3, 3)) for _ in range(6)]
        labels = [0, 0, 1, 1, 2, 2]
        g = self.gallery(items, labels)
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        rotated = self.gallery([q.T @ item for item in items], labels)
        for _ in range(10):
            query = rng.normal(size=(3, 3))
            assert classify_1nn(query, g) == classify_1nn(q.T @ query, rotated)

    def test_training_self_classification_zero(self):
        rng = np.random.default_rng(5)
        items = [rng.normal(size=(2, 2)) for _ in range(8)]
        labels = rng.integers(0, 3, size=8)
        g = self.gallery(items, labels)
        stack = Tensor3.stack_frontal(items)
        predictions = classify_batch(stack, g)
        assert error_rate(predictions, labels) == 0.0


class TestErrorRate:
    def test_all_correct(self):
        assert error_rate([1, 2, 3], [1, 2, 3]) == 0.0

    def test_all_wrong(self):
        assert error_rate([1, 1, 1], [2, 2, 2]) == 1.0

    def test_three_of_forty(self):
        truth = np.zeros(40, dtype=int)
        pred = truth.copy()
        pred[:3] = 1
        assert error_rate(pred, truth) == pytest.approx(0.075)

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            error_rate([1, 2], [1, 2, 3])


def test_build_gallery_roundtrip():
    rng = np.random.default_rng(6)
    labels = np.repeat([0, 1], 4)
    x = Tensor3(rng.normal(size=(4, 4, 8)))
    pair = identity_pair(4, 4)
    g = build_gallery(x, pair, labels)
    assert g.n == 8
    np.testing.assert_array_equal(g.projected.data, x.data)
