"""Dense symmetric and symmetric-definite eigensolvers.

Every eigendecomposition in the package funnels through the two functions
here so that the numerical contract lives in one place: inputs are
symmetrized, results carry a deterministic sign convention, and residual
and orthogonality bounds are verified after each solve.  A violated bound
raises instead of silently degrading the calling algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ContractError,
    DefinitenessError,
    NumericalQualityError,
    ParameterError,
    ShapeError,
)

RESIDUAL_TOL = 1e-8
ORTH_TOL = 1e-10
GEN_ORTH_TOL = 1e-8
# relative floor below which a "positive definite" matrix is rejected
DEFINITENESS_FLOOR = 1e-10
# allowed relative asymmetry of inputs before symmetrization
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class EigenSelection:
    """Which eigenpairs to return: ``count`` of them from the ``bottom``
    (smallest eigenvalues, returned ascending) or ``top`` (largest,
    returned descending)."""

    count: int
    which: str = "bottom"


def _square_symmetrized(m, what: str) -> np.ndarray:
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"{what} must be a square matrix, got shape {arr.shape}")
    scale = max(1.0, float(np.linalg.norm(arr)))
    if np.linalg.norm(arr - arr.T) > SYMMETRY_TOL * scale:
        raise ContractError(f"{what} is not symmetric within tolerance")
    return 0.5 * (arr + arr.T)


def _validated(sel: EigenSelection, order: int) -> EigenSelection:
    if sel.which not in ("bottom", "top"):
        raise ParameterError(f"selection must be 'bottom' or 'top', got {sel.which!r}")
    if not 1 <= sel.count <= order:
        raise ParameterError(f"selection count {sel.count} not in [1, {order}]")
    return sel


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip column signs so each column's largest-magnitude entry is positive.

    Ties resolve to the first maximal entry, which makes results stable
    across runs and comparable against hand-computed references.
    """
    v = np.array(vectors, dtype=np.float64, copy=True)
    for col in range(v.shape[1]):
        lead = int(np.argmax(np.abs(v[:, col])))
        if v[lead, col] < 0:
            v[:, col] = -v[:, col]
    return v


def _select(values: np.ndarray, vectors: np.ndarray, sel: EigenSelection):
    if sel.which == "bottom":
        idx = np.arange(sel.count)
    else:
        idx = np.arange(len(values) - 1, len(values) - 1 - sel.count, -1)
    return values[idx], vectors[:, idx]


def sym_eig(m, sel: EigenSelection) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric matrix.

    Returns ``(values, vectors)`` with orthonormal eigenvector columns;
    values are sorted ascending for ``bottom`` selections and descending
    for ``top``.  Raises :class:`NumericalQualityError` if the residual
    bound ``|M v - lambda v| <= 1e-8 |M|`` or the orthonormality bound
    ``|V^T V - I| <= 1e-10`` fails.
    """
    ms = _square_symmetrized(m, "sym_eig input")
    sel = _validated(sel, ms.shape[0])
    values, vectors = np.linalg.eigh(ms)
    values, vectors = _select(values, vectors, sel)
    vectors = fix_signs(vectors)

    m_norm = float(np.linalg.norm(ms))
    residual = np.linalg.norm(ms @ vectors - vectors * values, axis=0)
    if np.any(residual > RESIDUAL_TOL * max(m_norm, 1e-300)):
        raise NumericalQualityError(
            f"eigen residual {residual.max():.3e} exceeds {RESIDUAL_TOL:.0e} * |M|"
        )
    orth = np.linalg.norm(vectors.T @ vectors - np.eye(sel.count))
    if orth > ORTH_TOL:
        raise NumericalQualityError(f"eigenvector orthonormality defect {orth:.3e}")
    return values, vectors


def gen_sym_eig(m, n, sel: EigenSelection) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of the pencil ``M v = lambda N v`` for symmetric M, SPD N.

    ``N`` is accepted as positive definite when its smallest eigenvalue
    exceeds ``1e-10`` times its spectral radius; otherwise a
    :class:`DefinitenessError` carrying that smallest eigenvalue is
    raised so callers can apply their own repair.  Returned vectors are
    N-orthonormal (``V^T N V = I`` within 1e-8).
    """
    ms = _square_symmetrized(m, "gen_sym_eig left input")
    ns = _square_symmetrized(n, "gen_sym_eig right input")
    if ms.shape != ns.shape:
        raise ShapeError(f"matrix orders differ: {ms.shape} vs {ns.shape}")
    sel = _validated(sel, ms.shape[0])

    n_eigs = np.linalg.eigvalsh(ns)
    smallest = float(n_eigs[0])
    radius = float(np.max(np.abs(n_eigs)))
    if smallest <= DEFINITENESS_FLOOR * max(radius, 1e-300):
        raise DefinitenessError(
            f"constraint matrix not positive definite (smallest eigenvalue {smallest:.3e})",
            smallest,
        )
    try:
        values, vectors = scipy.linalg.eigh(ms, ns)
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
        raise DefinitenessError(
            f"generalized eigensolve failed on a near-singular constraint: {exc}",
            smallest,
        ) from exc
    values, vectors = _select(values, vectors, sel)
    vectors = fix_signs(vectors)

    scale = float(np.linalg.norm(ms) + np.linalg.norm(ns))
    residual = np.linalg.norm(ms @ vectors - (ns @ vectors) * values, axis=0)
    if np.any(residual > RESIDUAL_TOL * max(scale, 1e-300)):
        raise NumericalQualityError(
            f"generalized residual {residual.max():.3e} exceeds {RESIDUAL_TOL:.0e} * (|M|+|N|)"
        )
    orth = np.linalg.norm(vectors.T @ ns @ vectors - np.eye(sel.count))
    if orth > GEN_ORTH_TOL:
        raise NumericalQualityError(f"N-orthonormality defect {orth:.3e}")
    return values, vectors
