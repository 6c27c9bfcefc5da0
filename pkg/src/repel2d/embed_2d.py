"""Two-dimensional (image-as-matrix) projection methods.

Every method here projects a stack of matrices ``X_k`` to ``Y_k = U^T X_k V``
and differs only in an ``n x n`` sample-coupling matrix (or a pair of them)
placed along the sample mode of the data tensor:

* single minimized coupling, orthonormal factors  (2D-OLPP, 2D-ONPP),
* single maximized coupling, orthonormal factors  (GLRAM, 2D-PCA),
* minimized coupling with a maximized one as a normalization constraint
  (2D-LPP, 2D-NPP), or the reverse for the discriminant methods (2D-LDA).

The ``-R`` variants subtract ``beta`` times a repulsion-graph Laplacian
from the minimized coupling, pushing apart samples that are close in the
input space but belong to different classes.

All fits alternate between the two factors: fixing one side reduces the
trace objective to an ordinary (or generalized) symmetric eigenproblem of
image-side order, solved for the bottom or top eigenvectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import graphs
from .errors import DefinitenessError, ParameterError, RankError, ShapeError
from .spectral import EigenSelection, gen_sym_eig, sym_eig
from .tensor_core import Tensor3, contracted_product_33, mode_product, tensor_trace

__all__ = [
    "MatrixDataset",
    "MethodSpec",
    "ProjectorPair",
    "FitTrace",
    "METHOD_NAMES_2D",
    "centering_matrix",
    "lda_weight_matrix",
    "default_beta",
    "method_matrices",
    "col_subproblem_matrix",
    "row_subproblem_matrix",
    "trace_objective",
    "fit_orthonormal",
    "fit_generalized",
    "fit_discriminant",
    "fit_unilateral",
    "fit_method",
    "pre_process_2dpca",
    "compose_pairs",
]

SOLVER_ORTH_MIN = "orth_min"
SOLVER_ORTH_MAX = "orth_max"
SOLVER_GEN_MIN = "gen_min"
SOLVER_GEN_MAX = "gen_max"

DEFAULT_MAX_ITER = 5
DEFAULT_TOL = 1e-6

# method name -> (has min coupling, has max coupling, solver)
_METHOD_TABLE = {
    "GLRAM": (False, True, SOLVER_ORTH_MAX),
    "2D-PCA": (False, True, SOLVER_ORTH_MAX),
    "2D-OLPP": (True, False, SOLVER_ORTH_MIN),
    "2D-LPP": (True, True, SOLVER_GEN_MIN),
    "2D-ONPP": (True, False, SOLVER_ORTH_MIN),
    "2D-NPP": (True, True, SOLVER_GEN_MIN),
    "2D-LDA": (True, True, SOLVER_GEN_MAX),
}

METHOD_NAMES_2D = tuple(_METHOD_TABLE) + tuple(f"{m}-R" for m in _METHOD_TABLE if m not in ("GLRAM", "2D-PCA"))


@dataclass(frozen=True)
class MatrixDataset:
    """A stack of equally sized matrices with one class label per slice."""

    tensor: Tensor3
    labels: np.ndarray

    def __post_init__(self):
        lab = np.asarray(self.labels)
        if lab.ndim != 1 or lab.size != self.tensor.dims[2]:
            raise ShapeError(
                f"need one label per frontal slice: {lab.shape} labels for dims {self.tensor.dims}"
            )
        object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.tensor.dims[2]

    def vectorized_points(self) -> np.ndarray:
        """Each slice flattened column-major into a row of an (n, m1*m2) array."""
        from .tensor_core import matricize

        return matricize(self.tensor, 3)


@dataclass(frozen=True)
class MethodSpec:
    """A method name resolved to its coupling matrices and solver.

    ``min_coupling`` is the matrix whose projected trace the method drives
    down, ``max_coupling`` the one it drives up (either may be absent,
    matching the method family).  ``bandwidth`` records the Gaussian
    bandwidth actually used for the graph weights, ``beta`` and ``knn``
    the repulsion parameters.
    """

    name: str
    min_coupling: np.ndarray | None
    max_coupling: np.ndarray | None
    solver: str
    beta: float = 0.0
    knn: int = 0
    bandwidth: float | None = None


@dataclass(frozen=True)
class ProjectorPair:
    """Row and column projection bases for ``Y = row_basis^T X col_basis``.

    ``sides`` says which factors were actually solved for: ``"left_only"``
    / ``"right_only"`` fits pin the other factor to an exact identity.
    ``constraints`` records, per side, which normalization holds:
    ``"orthonormal"``, ``"coupled"`` (normalized against the maximized /
    constraint side matrix), or ``"identity"``.
    """

    row_basis: np.ndarray
    col_basis: np.ndarray
    sides: str = "bilateral"
    constraints: tuple[str, str] = ("orthonormal", "orthonormal")

    @property
    def d1(self) -> int:
        return self.row_basis.shape[1]

    @property
    def d2(self) -> int:
        return self.col_basis.shape[1]


@dataclass
class FitTrace:
    """Objective values after each half-step of an alternating fit, the
    number of full iterations run, whether the stopping test fired, and
    the largest constraint defect seen at any iterate."""

    objectives: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    max_constraint_defect: float = 0.0


def centering_matrix(n: int) -> np.ndarray:
    """The idempotent mean-removing matrix ``I - (1/n) e e^T``."""
    return np.eye(n) - np.full((n, n), 1.0 / n)


def lda_weight_matrix(labels) -> tuple[np.ndarray, np.ndarray]:
    """Label-graph weights ``w_ij = 1/n_k`` for same-class pairs, and the
    within-class coupling ``S = I - W``.

    ``S`` is symmetric, idempotent, and has rank ``n - c`` for ``c``
    classes.
    """
    lab = np.asarray(labels)
    if lab.ndim != 1 or lab.size == 0:
        raise ShapeError("labels must be a non-empty 1-d sequence")
    n = lab.size
    w = np.zeros((n, n))
    for value in np.unique(lab):
        members = np.nonzero(lab == value)[0]
        w[np.ix_(members, members)] = 1.0 / members.size
    return w, np.eye(n) - w


def default_beta(name: str) -> float:
    """Repulsion strength defaults: modest for the discriminant variant,
    0.5 elsewhere, 0 for methods without repulsion."""
    if not name.endswith("-R"):
        return 0.0
    return 0.2 if name == "2D-LDA-R" else 0.5


def method_matrices(
    name: str,
    dataset: MatrixDataset,
    *,
    knn: int = 6,
    beta: float | None = None,
    bandwidth: float | None = None,
) -> MethodSpec:
    """Resolve a method name to its coupling matrices for ``dataset``.

    Graph-based methods build their weights from the supervised label
    graph: Gaussian weights for the locality-preserving family,
    reconstruction weights for the neighborhood-preserving family.  The
    repulsion variants additionally build a ``knn`` affinity graph on the
    vectorized slices, take the edges that join different classes, weight
    them with the same Gaussian bandwidth, and subtract ``beta`` times the
    resulting Laplacian from the minimized coupling.  A single bandwidth
    (given, or the mean squared label-edge distance) is used throughout.
    """
    repulsion = name.endswith("-R")
    base = name[:-2] if repulsion else name
    if base not in _METHOD_TABLE or (repulsion and base in ("GLRAM", "2D-PCA")):
        raise ParameterError(f"unknown method name {name!r}")
    if beta is None:
        beta = default_beta(name)
    labels = dataset.labels
    n = dataset.n
    has_min, has_max, solver = _METHOD_TABLE[base]

    points = None
    label_graph = None
    resolved_t = bandwidth

    def _points():
        nonlocal points
        if points is None:
            points = dataset.vectorized_points()
        return points

    def _label_graph():
        nonlocal label_graph
        if label_graph is None:
            label_graph = graphs.build_label_graph(labels)
        return label_graph

    def _bandwidth():
        nonlocal resolved_t
        if resolved_t is None:
            resolved_t = graphs.default_bandwidth(_label_graph(), _points())
        return resolved_t

    min_coupling: np.ndarray | None = None
    max_coupling: np.ndarray | None = None
    if base == "GLRAM":
        max_coupling = np.eye(n)
    elif base == "2D-PCA":
        max_coupling = centering_matrix(n)
    elif base in ("2D-OLPP", "2D-LPP"):
        weighted = graphs.gaussian_weights(_label_graph(), _points(), _bandwidth())
        bundle = graphs.laplacian(weighted)
        min_coupling = bundle.laplacian
        if base == "2D-LPP":
            max_coupling = bundle.degree
    elif base in ("2D-ONPP", "2D-NPP"):
        recon = graphs.lle_weights(_label_graph(), _points())
        min_coupling = graphs.reconstruction_penalty(recon.weights)
        if base == "2D-NPP":
            max_coupling = np.eye(n)
    else:  # 2D-LDA
        w, s = lda_weight_matrix(labels)
        min_coupling = s
        max_coupling = centering_matrix(n) - s

    if repulsion and beta != 0.0:
        affinity = graphs.build_knn_graph(_points(), knn)
        rep_graph = graphs.build_repulsion_graph(_label_graph(), affinity)
        rep = graphs.repulsion_laplacian(rep_graph, _points(), _bandwidth())
        min_coupling = min_coupling - beta * rep.laplacian

    return MethodSpec(
        name=name,
        min_coupling=min_coupling,
        max_coupling=max_coupling,
        solver=solver,
        beta=float(beta),
        knn=int(knn) if repulsion else 0,
        bandwidth=resolved_t,
    )


def _t3(x) -> np.ndarray:
    if isinstance(x, Tensor3):
        return x.data
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 3:
        raise ShapeError(f"expected a third-order tensor, got shape {arr.shape}")
    return arr


def _sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def _check_coupling(c, n: int, what: str) -> np.ndarray:
    if c is None:
        raise ParameterError(f"method spec lacks the {what} coupling required by this solver")
    arr = np.asarray(c, dtype=np.float64)
    if arr.shape != (n, n):
        raise ShapeError(f"{what} coupling must be {n}x{n}, got {arr.shape}")
    if np.linalg.norm(arr - arr.T) > 1e-10 * max(1.0, np.linalg.norm(arr)):
        raise ShapeError(f"{what} coupling must be symmetric")
    return _sym(arr)


def _compress_rows(arr: np.ndarray, row_basis: np.ndarray) -> np.ndarray:
    return np.einsum("ijk,ih->hjk", arr, row_basis)


def _compress_cols(arr: np.ndarray, col_basis: np.ndarray) -> np.ndarray:
    return np.einsum("ijk,jh->ihk", arr, col_basis)


def _col_matrix(z: np.ndarray, coupling: np.ndarray) -> np.ndarray:
    # sum_i Z(i,:,:) C Z(i,:,:)^T over horizontal slices
    t = np.einsum("ipk,kl->ipl", z, coupling)
    return _sym(np.einsum("ipl,iql->pq", t, z))


def _row_matrix(z: np.ndarray, coupling: np.ndarray) -> np.ndarray:
    # sum_j Z(:,j,:) C Z(:,j,:)^T over lateral slices
    t = np.einsum("pjk,kl->pjl", z, coupling)
    return _sym(np.einsum("pjl,qjl->pq", t, z))


def col_subproblem_matrix(x, row_basis, coupling) -> np.ndarray:
    """The ``m2 x m2`` matrix whose eigenvectors update the column factor.

    With the rows compressed by ``row_basis``, accumulates
    ``sum_i Z(i,:,:) C Z(i,:,:)^T`` over the horizontal slices of the
    compressed tensor; the result is symmetrized before use.
    """
    arr = _t3(x)
    basis = np.asarray(row_basis, dtype=np.float64)
    if basis.ndim != 2 or basis.shape[0] != arr.shape[0]:
        raise ShapeError(f"row basis shape {basis.shape} does not fit tensor {arr.shape}")
    c = _check_coupling(coupling, arr.shape[2], "sample")
    return _col_matrix(_compress_rows(arr, basis), c)


def row_subproblem_matrix(x, col_basis, coupling) -> np.ndarray:
    """The ``m1 x m1`` matrix whose eigenvectors update the row factor."""
    arr = _t3(x)
    basis = np.asarray(col_basis, dtype=np.float64)
    if basis.ndim != 2 or basis.shape[0] != arr.shape[1]:
        raise ShapeError(f"column basis shape {basis.shape} does not fit tensor {arr.shape}")
    c = _check_coupling(coupling, arr.shape[2], "sample")
    return _row_matrix(_compress_cols(arr, basis), c)


def trace_objective(y, coupling) -> float:
    """Trace objective of a projected tensor against a sample coupling,
    computed along the tensor route (third-mode product, contraction over
    the sample mode, paired trace)."""
    yt = y if isinstance(y, Tensor3) else Tensor3(y)
    c = np.asarray(coupling, dtype=np.float64)
    return tensor_trace(contracted_product_33(mode_product(yt, c, 3), yt))


def _validate_dims(arr: np.ndarray, d1: int, d2: int):
    m1, m2, _ = arr.shape
    if not 1 <= d1 <= m1:
        raise ParameterError(f"d1 must be in [1, {m1}], got {d1}")
    if not 1 <= d2 <= m2:
        raise ParameterError(f"d2 must be in [1, {m2}], got {d2}")


def _orth_defect(basis: np.ndarray) -> float:
    return float(np.linalg.norm(basis.T @ basis - np.eye(basis.shape[1])))


def _converged(it: int, obj_half: float, obj_full: float, prev_full: float | None, tol: float) -> bool:
    if it == 1:
        return abs(obj_full - obj_half) <= tol * max(1.0, abs(obj_half))
    return abs(obj_full - prev_full) <= tol * max(1.0, abs(prev_full))


def fit_orthonormal(
    x,
    spec: MethodSpec,
    d1: int,
    d2: int,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> tuple[ProjectorPair, FitTrace]:
    """Alternating eigensolver for the single-coupling methods.

    Starting from the first ``d1`` identity columns as the row factor, it
    alternately recomputes the column factor from the bottom (or, for
    maximizing methods, top) eigenvectors of the column subproblem matrix
    and then the row factor likewise.  Each half-step solves its
    subproblem exactly, so the objective sequence is monotone; iteration
    stops when the relative objective change between full iterations
    drops below ``tol`` or ``max_iter`` is reached.
    """
    arr = _t3(x)
    _validate_dims(arr, d1, d2)
    if spec.solver == SOLVER_ORTH_MIN:
        coupling, which = spec.min_coupling, "bottom"
    elif spec.solver == SOLVER_ORTH_MAX:
        coupling, which = spec.max_coupling, "top"
    else:
        raise ParameterError(f"fit_orthonormal cannot run solver {spec.solver!r}")
    c = _check_coupling(coupling, arr.shape[2], "sample")

    u = np.eye(arr.shape[0], d1)
    v = np.eye(arr.shape[1], d2)
    trace = FitTrace()
    prev_full = None
    for it in range(1, max_iter + 1):
        vals_v, v = sym_eig(_col_matrix(_compress_rows(arr, u), c), EigenSelection(d2, which))
        obj_half = float(np.sum(vals_v))
        trace.objectives.append(obj_half)
        trace.max_constraint_defect = max(trace.max_constraint_defect, _orth_defect(v), _orth_defect(u))

        vals_u, u = sym_eig(_row_matrix(_compress_cols(arr, v), c), EigenSelection(d1, which))
        obj_full = float(np.sum(vals_u))
        trace.objectives.append(obj_full)
        trace.max_constraint_defect = max(trace.max_constraint_defect, _orth_defect(u), _orth_defect(v))

        trace.iterations = it
        trace.converged = _converged(it, obj_half, obj_full, prev_full, tol)
        prev_full = obj_full
        if trace.converged:
            break
    pair = ProjectorPair(u, v, "bilateral", ("orthonormal", "orthonormal"))
    return pair, trace


def _gen_solve_with_ridge(
    m: np.ndarray, constraint: np.ndarray, sel: EigenSelection
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Generalized solve with a one-shot ridge repair of the constraint side.

    Returns ``(values, vectors, constraint_used)``; a second definiteness
    failure propagates with the diagnostics chained.
    """
    try:
        values, vectors = gen_sym_eig(m, constraint, sel)
        return values, vectors, constraint
    except DefinitenessError as first:
        shift = abs(first.smallest_eigenvalue) + 1e-8 * float(np.linalg.norm(constraint))
        repaired = constraint + shift * np.eye(constraint.shape[0])
        try:
            values, vectors = gen_sym_eig(m, repaired, sel)
            return values, vectors, repaired
        except DefinitenessError as second:
            raise DefinitenessError(
                f"constraint side not positive definite even after ridge shift {shift:.3e}: {second}",
                second.smallest_eigenvalue,
            ) from first


def fit_generalized(
    x,
    spec: MethodSpec,
    d1: int,
    d2: int,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> tuple[ProjectorPair, FitTrace]:
    """Alternating solver for methods that minimize one coupling while the
    maximized one acts as a normalization constraint.

    Each half-step solves the bottom generalized eigenproblem of the pair
    of subproblem matrices; factors come out normalized against the
    constraint-side matrix of the step that produced them.  A constraint
    matrix that fails the definiteness check is ridge-shifted once and the
    solve retried; a second failure aborts the fit.
    """
    arr = _t3(x)
    _validate_dims(arr, d1, d2)
    a = _check_coupling(spec.min_coupling, arr.shape[2], "minimized")
    b = _check_coupling(spec.max_coupling, arr.shape[2], "maximized")

    u = np.eye(arr.shape[0], d1)
    v = np.eye(arr.shape[1], d2)
    trace = FitTrace()
    prev_full = None
    for it in range(1, max_iter + 1):
        z1 = _compress_rows(arr, u)
        vals_v, v, used = _gen_solve_with_ridge(
            _col_matrix(z1, a), _col_matrix(z1, b), EigenSelection(d2, "bottom")
        )
        obj_half = float(np.sum(vals_v))
        trace.objectives.append(obj_half)
        defect_v = float(np.linalg.norm(v.T @ used @ v - np.eye(d2)))

        z2 = _compress_cols(arr, v)
        vals_u, u, used_u = _gen_solve_with_ridge(
            _row_matrix(z2, a), _row_matrix(z2, b), EigenSelection(d1, "bottom")
        )
        obj_full = float(np.sum(vals_u))
        trace.objectives.append(obj_full)
        defect_u = float(np.linalg.norm(u.T @ used_u @ u - np.eye(d1)))
        trace.max_constraint_defect = max(trace.max_constraint_defect, defect_v, defect_u)

        trace.iterations = it
        trace.converged = _converged(it, obj_half, obj_full, prev_full, tol)
        prev_full = obj_full
        if trace.converged:
            break
    pair = ProjectorPair(u, v, "bilateral", ("coupled", "coupled"))
    return pair, trace


def fit_discriminant(
    x,
    spec: MethodSpec,
    d1: int,
    d2: int,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> tuple[ProjectorPair, FitTrace]:
    """Discriminant solver: maximize the between-class coupling subject to
    normalization against the within-class side.

    Solves the top generalized eigenproblem with the roles of the two side
    matrices swapped relative to :func:`fit_generalized`.  Without
    repulsion it alternates like the other fits.  With repulsion active
    (``beta > 0``) the within-class side can lose definiteness under
    iteration, so a single pass computes the row and column factors
    independently from the uncompressed tensor, each like a one-sided fit.
    """
    arr = _t3(x)
    _validate_dims(arr, d1, d2)
    a = _check_coupling(spec.min_coupling, arr.shape[2], "minimized")
    b = _check_coupling(spec.max_coupling, arr.shape[2], "maximized")
    if np.linalg.norm(b) == 0.0:
        raise RankError("between-class coupling is identically zero (single class?)")

    m1, m2, _ = arr.shape
    trace = FitTrace()
    if spec.beta > 0.0:
        z1 = _compress_rows(arr, np.eye(m1))
        b1, a1 = _col_matrix(z1, b), _col_matrix(z1, a)
        _require_nonzero(b1)
        vals_v, v, used_v = _gen_solve_with_ridge(b1, a1, EigenSelection(d2, "top"))
        trace.objectives.append(float(np.sum(vals_v)))

        z2 = _compress_cols(arr, np.eye(m2))
        b2, a2 = _row_matrix(z2, b), _row_matrix(z2, a)
        _require_nonzero(b2)
        vals_u, u, used_u = _gen_solve_with_ridge(b2, a2, EigenSelection(d1, "top"))
        trace.objectives.append(float(np.sum(vals_u)))

        trace.iterations = 1
        trace.converged = True
        trace.max_constraint_defect = max(
            float(np.linalg.norm(v.T @ used_v @ v - np.eye(d2))),
            float(np.linalg.norm(u.T @ used_u @ u - np.eye(d1))),
        )
        pair = ProjectorPair(u, v, "bilateral", ("coupled", "coupled"))
        return pair, trace

    u = np.eye(m1, d1)
    v = np.eye(m2, d2)
    prev_full = None
    for it in range(1, max_iter + 1):
        z1 = _compress_rows(arr, u)
        b1 = _col_matrix(z1, b)
        _require_nonzero(b1)
        vals_v, v, used_v = _gen_solve_with_ridge(b1, _col_matrix(z1, a), EigenSelection(d2, "top"))
        obj_half = float(np.sum(vals_v))
        trace.objectives.append(obj_half)
        defect_v = float(np.linalg.norm(v.T @ used_v @ v - np.eye(d2)))

        z2 = _compress_cols(arr, v)
        b2 = _row_matrix(z2, b)
        _require_nonzero(b2)
        vals_u, u, used_u = _gen_solve_with_ridge(b2, _row_matrix(z2, a), EigenSelection(d1, "top"))
        obj_full = float(np.sum(vals_u))
        trace.objectives.append(obj_full)
        defect_u = float(np.linalg.norm(u.T @ used_u @ u - np.eye(d1)))
        trace.max_constraint_defect = max(trace.max_constraint_defect, defect_v, defect_u)

        trace.iterations = it
        trace.converged = _converged(it, obj_half, obj_full, prev_full, tol)
        prev_full = obj_full
        if trace.converged:
            break
    pair = ProjectorPair(u, v, "bilateral", ("coupled", "coupled"))
    return pair, trace


def _require_nonzero(side: np.ndarray):
    if np.linalg.norm(side) == 0.0:
        raise RankError("maximized-side subproblem matrix is identically zero")


def fit_unilateral(x, spec: MethodSpec, side: str, d: int) -> tuple[ProjectorPair, FitTrace]:
    """One-sided fit: solve a single eigenproblem for the chosen factor
    and pin the other factor to an exact identity.

    ``side="left"`` solves the row factor (column factor = identity);
    ``side="right"`` solves the column factor.  One iteration is always
    optimal here, so the trace reports a converged single step.
    """
    arr = _t3(x)
    m1, m2, n = arr.shape
    if side not in ("left", "right"):
        raise ParameterError(f"side must be 'left' or 'right', got {side!r}")
    if side == "left":
        _validate_dims(arr, d, m2)
        build = lambda c: _row_matrix(_compress_cols(arr, np.eye(m2)), c)
    else:
        _validate_dims(arr, m1, d)
        build = lambda c: _col_matrix(_compress_rows(arr, np.eye(m1)), c)

    defect = 0.0
    if spec.solver in (SOLVER_ORTH_MIN, SOLVER_ORTH_MAX):
        coupling = spec.min_coupling if spec.solver == SOLVER_ORTH_MIN else spec.max_coupling
        which = "bottom" if spec.solver == SOLVER_ORTH_MIN else "top"
        c = _check_coupling(coupling, n, "sample")
        values, basis = sym_eig(build(c), EigenSelection(d, which))
        constraint = "orthonormal"
        defect = _orth_defect(basis)
    elif spec.solver == SOLVER_GEN_MIN:
        a = _check_coupling(spec.min_coupling, n, "minimized")
        b = _check_coupling(spec.max_coupling, n, "maximized")
        values, basis, used = _gen_solve_with_ridge(build(a), build(b), EigenSelection(d, "bottom"))
        constraint = "coupled"
        defect = float(np.linalg.norm(basis.T @ used @ basis - np.eye(d)))
    elif spec.solver == SOLVER_GEN_MAX:
        a = _check_coupling(spec.min_coupling, n, "minimized")
        b = _check_coupling(spec.max_coupling, n, "maximized")
        if np.linalg.norm(b) == 0.0:
            raise RankError("between-class coupling is identically zero (single class?)")
        bmat = build(b)
        _require_nonzero(bmat)
        values, basis, used = _gen_solve_with_ridge(bmat, build(a), EigenSelection(d, "top"))
        constraint = "coupled"
        defect = float(np.linalg.norm(basis.T @ used @ basis - np.eye(d)))
    else:
        raise ParameterError(f"unknown solver {spec.solver!r}")

    if side == "left":
        pair = ProjectorPair(basis, np.eye(m2), "left_only", (constraint, "identity"))
    else:
        pair = ProjectorPair(np.eye(m1), basis, "right_only", ("identity", constraint))
    return pair, FitTrace([float(np.sum(values))], 1, True, defect)


def fit_method(
    x,
    spec: MethodSpec,
    d1: int,
    d2: int,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> tuple[ProjectorPair, FitTrace]:
    """Dispatch a bilateral fit to the solver named by the method spec."""
    if spec.solver in (SOLVER_ORTH_MIN, SOLVER_ORTH_MAX):
        return fit_orthonormal(x, spec, d1, d2, max_iter, tol)
    if spec.solver == SOLVER_GEN_MIN:
        return fit_generalized(x, spec, d1, d2, max_iter, tol)
    if spec.solver == SOLVER_GEN_MAX:
        return fit_discriminant(x, spec, d1, d2, max_iter, tol)
    raise ParameterError(f"unknown solver {spec.solver!r}")


def pre_process_2dpca(x, dims: tuple[int, int], max_iter: int = DEFAULT_MAX_ITER) -> tuple[Tensor3, ProjectorPair]:
    """Compress a tensor with a bilateral 2D-PCA fit to intermediate dims.

    Returns the reduced tensor and the fitted pair; compose the pair with
    a downstream fit's projectors to map back to the original space.
    Useful when small target dimensions would otherwise make the
    subproblem matrices singular.
    """
    arr = _t3(x)
    p1, p2 = dims
    _validate_dims(arr, p1, p2)
    n = arr.shape[2]
    spec = MethodSpec("2D-PCA", None, centering_matrix(n), SOLVER_ORTH_MAX)
    pair, _ = fit_orthonormal(arr, spec, p1, p2, max_iter)
    reduced = np.einsum("ijk,ih,jl->hlk", arr, pair.row_basis, pair.col_basis)
    return Tensor3(reduced), pair


def compose_pairs(outer: ProjectorPair, inner: ProjectorPair) -> ProjectorPair:
    """Compose a pre-processing pair with a downstream fit's pair.

    The result maps the original space directly to the final reduced
    space: ``row = outer.row @ inner.row`` and likewise for columns.
    """
    if outer.row_basis.shape[1] != inner.row_basis.shape[0]:
        raise ShapeError("row bases do not chain")
    if outer.col_basis.shape[1] != inner.col_basis.shape[0]:
        raise ShapeError("column bases do not chain")
    row_c = outer.constraints[0] if inner.constraints[0] == "identity" else inner.constraints[0]
    col_c = outer.constraints[1] if inner.constraints[1] == "identity" else inner.constraints[1]
    if row_c == "identity" and col_c != "identity":
        sides = "right_only"
    elif col_c == "identity" and row_c != "identity":
        sides = "left_only"
    else:
        sides = "bilateral"
    return ProjectorPair(
        outer.row_basis @ inner.row_basis,
        outer.col_basis @ inner.col_basis,
        sides,
        (row_c, col_c),
    )
