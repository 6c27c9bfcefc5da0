"""Image-as-vector projection methods: PCA through the repulsion variants.

Data sit in the columns of an ``m x n`` matrix.  Every method returns an
``m x d`` basis; graph-based methods build their weights from the
supervised label graph (Gaussian weights for the locality-preserving
family, reconstruction weights for the neighborhood-preserving family),
and the ``-R`` variants subtract a scaled repulsion Laplacian, mirroring
the matrix-data methods.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import graphs
from .errors import ParameterError, ShapeError
from .spectral import EigenSelection, fix_signs, gen_sym_eig, sym_eig

__all__ = [
    "VectorDataset",
    "Projector1D",
    "METHOD_NAMES_1D",
    "scatter_matrices",
    "fit_1d",
    "default_predim",
]

METHOD_NAMES_1D = ("PCA", "LDA", "LPP", "OLPP", "NPP", "ONPP", "LDA-R", "OLPP-R", "ONPP-R")


@dataclass(frozen=True)
class VectorDataset:
    """Column-sample data matrix with one class label per column."""

    data: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        lab = np.asarray(self.labels)
        if arr.ndim != 2:
            raise ShapeError(f"data must be an (m, n) matrix, got shape {arr.shape}")
        if lab.ndim != 1 or lab.size != arr.shape[1]:
            raise ShapeError("need one label per data column")
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "labels", lab)

    @property
    def m(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    def class_count(self) -> int:
        return np.unique(self.labels).size


@dataclass(frozen=True)
class Projector1D:
    """Projection basis and the normalization its columns satisfy."""

    basis: np.ndarray
    constraint: str  # "orthonormal" or "b_orthonormal"

    @property
    def d(self) -> int:
        return self.basis.shape[1]

    def transform(self, x) -> np.ndarray:
        return self.basis.T @ np.asarray(x, dtype=np.float64)


def scatter_matrices(ds: VectorDataset) -> tuple[np.ndarray, np.ndarray]:
    """Within-class and between-class scatter matrices.

    The within matrix sums squared deviations from each class mean; the
    between matrix sums class-size-weighted squared deviations of class
    means from the global mean.  Both are symmetric positive semidefinite
    and they add up to the total scatter.
    """
    x = ds.data
    mean = x.mean(axis=1, keepdims=True)
    sw = np.zeros((ds.m, ds.m))
    sb = np.zeros((ds.m, ds.m))
    for value in np.unique(ds.labels):
        cols = x[:, ds.labels == value]
        cmean = cols.mean(axis=1, keepdims=True)
        centered = cols - cmean
        sw += centered @ centered.T
        diff = cmean - mean
        sb += cols.shape[1] * (diff @ diff.T)
    return 0.5 * (sw + sw.T), 0.5 * (sb + sb.T)


def default_predim(ds: VectorDataset) -> int:
    """Default PCA pre-compression target: ``min(n - c, m)``, which keeps
    the graph-derived matrices nonsingular in supervised mode."""
    return min(ds.n - ds.class_count(), ds.m)


def _pca_basis(x: np.ndarray, d: int) -> np.ndarray:
    """Top-d eigenvectors of the column covariance of ``x`` (unscaled).

    Uses the m x m eigenproblem when rows are few, otherwise the n x n
    Gram trick, so vectorized images never force a huge dense solve.
    """
    m, n = x.shape
    if not 1 <= d <= m:
        raise ParameterError(f"PCA dimension must be in [1, {m}], got {d}")
    centered = x - x.mean(axis=1, keepdims=True)
    if m <= n:
        _, vectors = sym_eig(centered @ centered.T, EigenSelection(d, "top"))
        return vectors
    gram = centered.T @ centered
    values, vectors = sym_eig(gram, EigenSelection(min(d, n), "top"))
    keep = values > max(values[0], 0.0) * 1e-12
    if np.count_nonzero(keep) < d:
        raise ParameterError(f"data rank too low for {d} principal components")
    basis = centered @ vectors[:, :d] / np.sqrt(values[:d])
    return fix_signs(basis)


def _repulsion_laplacian(ds: VectorDataset, knn: int, bandwidth: float | None) -> tuple[np.ndarray, float]:
    points = ds.data.T
    label_graph = graphs.build_label_graph(ds.labels)
    if bandwidth is None:
        bandwidth = graphs.default_bandwidth(label_graph, points)
    affinity = graphs.build_knn_graph(points, knn)
    rep_graph = graphs.build_repulsion_graph(label_graph, affinity)
    bundle = graphs.repulsion_laplacian(rep_graph, points, bandwidth)
    return bundle.laplacian, bandwidth


def _spd_or_shifted(m: np.ndarray) -> np.ndarray:
    """Ridge-shift a symmetric matrix up to positive definiteness when needed."""
    eigs = np.linalg.eigvalsh(0.5 * (m + m.T))
    smallest = float(eigs[0])
    radius = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    if smallest > 1e-10 * max(radius, 1e-300):
        return m
    shift = abs(smallest) + 1e-8 * float(np.linalg.norm(m))
    return m + shift * np.eye(m.shape[0])


def fit_1d(
    ds: VectorDataset,
    method: str,
    d: int,
    *,
    knn: int = 6,
    bandwidth: float | None = None,
    beta: float | None = None,
    pca_predim: int | str | None = None,
) -> Projector1D:
    """Fit a vector-space projection method.

    Parameters
    ----------
    ds : VectorDataset
        Training data (columns) with labels.
    method : str
        One of ``METHOD_NAMES_1D``.
    d : int
        Target dimension (after any PCA pre-compression).
    knn, bandwidth, beta :
        Repulsion-graph neighbor count, Gaussian bandwidth (data-driven
        when omitted), and repulsion strength (0.5 by default, 0.2 for
        LDA-R).
    pca_predim :
        If set, first compress with PCA to this many dimensions
        (``"auto"`` selects ``min(n - c, m)``) and return the composed
        basis.  Ignored for plain PCA.
    """
    if method not in METHOD_NAMES_1D:
        raise ParameterError(f"unknown method name {method!r}")
    if d < 1:
        raise ParameterError(f"dimension must be >= 1, got {d}")

    if method != "PCA" and pca_predim is not None:
        p = default_predim(ds) if pca_predim == "auto" else int(pca_predim)
        if not d <= p <= ds.m:
            raise ParameterError(f"PCA pre-dimension {p} must lie in [{d}, {ds.m}]")
        pre = _pca_basis(ds.data, p)
        reduced = VectorDataset(pre.T @ ds.data, ds.labels)
        inner = fit_1d(reduced, method, d, knn=knn, bandwidth=bandwidth, beta=beta)
        return Projector1D(pre @ inner.basis, inner.constraint)

    if method == "PCA":
        return Projector1D(_pca_basis(ds.data, d), "orthonormal")

    x = ds.data
    if d >= ds.m:
        raise ParameterError(f"dimension must be < {ds.m}, got {d}")

    if method == "LDA":
        sw, sb = scatter_matrices(ds)
        _, basis = gen_sym_eig(sb, sw, EigenSelection(d, "top"))
        return Projector1D(basis, "b_orthonormal")

    if method == "LDA-R":
        if beta is None:
            beta = 0.2
        sw, sb = scatter_matrices(ds)
        rep, _ = _repulsion_laplacian(ds, knn, bandwidth)
        penalized = _spd_or_shifted(sw - beta * (x @ rep @ x.T))
        _, basis = gen_sym_eig(sb, penalized, EigenSelection(d, "top"))
        return Projector1D(basis, "b_orthonormal")

    label_graph = graphs.build_label_graph(ds.labels)
    points = x.T
    if bandwidth is None:
        bandwidth = graphs.default_bandwidth(label_graph, points)

    if method in ("LPP", "OLPP", "OLPP-R"):
        weighted = graphs.gaussian_weights(label_graph, points, bandwidth)
        bundle = graphs.laplacian(weighted)
        middle = bundle.laplacian
        if method == "OLPP-R":
            if beta is None:
                beta = 0.5
            rep, _ = _repulsion_laplacian(ds, knn, bandwidth)
            middle = middle - beta * rep
        if method == "LPP":
            _, basis = gen_sym_eig(x @ middle @ x.T, x @ bundle.degree @ x.T, EigenSelection(d, "bottom"))
            return Projector1D(basis, "b_orthonormal")
        _, basis = sym_eig(x @ middle @ x.T, EigenSelection(d, "bottom"))
        return Projector1D(basis, "orthonormal")

    # NPP / ONPP / ONPP-R
    recon = graphs.lle_weights(label_graph, points)
    middle = graphs.reconstruction_penalty(recon.weights)
    if method == "ONPP-R":
        if beta is None:
            beta = 0.5
        rep, _ = _repulsion_laplacian(ds, knn, bandwidth)
        middle = middle - beta * rep
    if method == "NPP":
        _, basis = gen_sym_eig(x @ middle @ x.T, x @ x.T, EigenSelection(d, "bottom"))
        return Projector1D(basis, "b_orthonormal")
    _, basis = sym_eig(x @ middle @ x.T, EigenSelection(d, "bottom"))
    return Projector1D(basis, "orthonormal")
