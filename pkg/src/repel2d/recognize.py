"""Projection of test images and nearest-neighbor classification.

Distances are Frobenius throughout; ties resolve to the lowest gallery
index so classification is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed_2d import ProjectorPair
from .errors import ParameterError, ShapeError
from .tensor_core import Tensor3

__all__ = ["GallerySet", "project", "project_tensor", "build_gallery", "classify_1nn", "classify_batch", "error_rate"]


@dataclass(frozen=True)
class GallerySet:
    """Projected training stack plus its labels."""

    projected: Tensor3
    labels: np.ndarray

    def __post_init__(self):
        lab = np.asarray(self.labels)
        if lab.ndim != 1 or lab.size != self.projected.dims[2]:
            raise ShapeError("need one label per projected gallery slice")
        if lab.size == 0:
            raise ParameterError("gallery must be non-empty")
        object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.projected.dims[2]


def project(x, pair: ProjectorPair) -> np.ndarray:
    """Project one image matrix: ``row_basis^T @ x @ col_basis``."""
    mat = np.asarray(x, dtype=np.float64)
    if mat.ndim != 2:
        raise ShapeError(f"expected a matrix, got shape {mat.shape}")
    if mat.shape != (pair.row_basis.shape[0], pair.col_basis.shape[0]):
        raise ShapeError(
            f"image shape {mat.shape} does not match projector "
            f"({pair.row_basis.shape[0]}, {pair.col_basis.shape[0]})"
        )
    return pair.row_basis.T @ mat @ pair.col_basis


def project_tensor(x: Tensor3, pair: ProjectorPair) -> Tensor3:
    """Project every frontal slice of a stack.

    Slice k of the result is bit-identical to ``project`` applied to
    slice k of the input.
    """
    out = np.empty((pair.row_basis.shape[1], pair.col_basis.shape[1], x.dims[2]))
    for k in range(x.dims[2]):
        out[:, :, k] = project(x.frontal_slice(k), pair)
    return Tensor3(out)


def build_gallery(x: Tensor3, pair: ProjectorPair, labels) -> GallerySet:
    return GallerySet(project_tensor(x, pair), np.asarray(labels))


def classify_1nn(y, gallery: GallerySet):
    """Label of the gallery item nearest to ``y`` in Frobenius distance."""
    mat = np.asarray(y, dtype=np.float64)
    stack = gallery.projected.data
    if mat.shape != stack.shape[:2]:
        raise ShapeError(f"query shape {mat.shape} does not match gallery {stack.shape[:2]}")
    d2 = np.einsum("ijk->k", (stack - mat[:, :, None]) ** 2)
    return gallery.labels[int(np.argmin(d2))]


def classify_batch(queries: Tensor3, gallery: GallerySet) -> np.ndarray:
    """Classify every frontal slice of a projected query stack."""
    return np.asarray([classify_1nn(queries.frontal_slice(k), gallery) for k in range(queries.dims[2])])


def error_rate(predictions, truth) -> float:
    """Fraction of mismatched labels."""
    pred = np.asarray(predictions)
    true = np.asarray(truth)
    if pred.shape != true.shape or pred.ndim != 1:
        raise ShapeError(f"prediction/truth shapes differ: {pred.shape} vs {true.shape}")
    if pred.size == 0:
        raise ParameterError("cannot compute an error rate over zero predictions")
    return float(np.mean(pred != true))
