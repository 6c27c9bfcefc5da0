"""Seeded recognition experiments over methods, modes, and dimensions.

For every (method, dimension, realization) cell the harness fits on a
fresh per-realization train split, projects gallery and queries, scores a
1-NN classifier, and aggregates mean/standard deviation over realizations.
Cells are independent and deterministic given the config, so they may run
concurrently; results are reduced in sorted key order either way.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__
from . import embed_1d, embed_2d, recognize
from .datasets import ImageDataset, load_dataset, matrix_dataset, split_dataset, vector_dataset
from .errors import ParameterError, Repel2dError
from .tensor_core import Tensor3

__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "ResultTable",
    "run_experiment",
    "run_cell",
    "emit_csv",
    "emit_plotdata",
    "write_metadata",
    "parse_result_csv",
    "CSV_HEADER",
]

CSV_HEADER = "method,mode,dimension,mean_error,std_error,mean_fit_seconds"

MODES = ("unilateral", "bilateral")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one benchmark run.

    ``mode`` applies to the matrix-data methods: ``"unilateral"`` solves
    only the column factor at each sweep dimension (rows untouched),
    ``"bilateral"`` solves both factors at the same dimension.  Vector
    methods ignore it.  ``pre_dims`` optionally compresses the data by a
    bilateral 2D-PCA before fitting any matrix method other than
    GLRAM/2D-PCA themselves.
    """

    dataset: str = ""
    methods: tuple[str, ...] = ("2D-PCA",)
    mode: str = "unilateral"
    dims: tuple[int, ...] = (2, 4, 6, 8, 10)
    train_per_class: int = 5
    realizations: int = 20
    seed: int = 0
    knn: int = 6
    beta: float | None = None
    bandwidth: float | None = None
    pca_predim: int | None = None
    pre_dims: tuple[int, int] | None = None
    max_iter: int = 5
    jobs: int = 1
    resize: tuple[int, int] | None = None


@dataclass
class ResultRow:
    method: str
    mode: str
    dimension: int
    mean_error: float
    std_error: float
    mean_fit_seconds: float


@dataclass
class ResultTable:
    rows: list[ResultRow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


def _validate_config(cfg: ExperimentConfig, ds: ImageDataset):
    if cfg.mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {cfg.mode!r}")
    if cfg.realizations < 1:
        raise ParameterError("realizations must be >= 1")
    known = set(embed_2d.METHOD_NAMES_2D) | set(embed_1d.METHOD_NAMES_1D)
    for name in cfg.methods:
        if name not in known:
            raise ParameterError(f"unknown method {name!r}")
    m1, m2 = ds.image_shape
    side1, side2 = (cfg.pre_dims if cfg.pre_dims is not None else (m1, m2))
    for d in cfg.dims:
        if d < 1:
            raise ParameterError(f"dimension {d} must be >= 1")
        for name in cfg.methods:
            if name in embed_2d.METHOD_NAMES_2D:
                limit = side2 if cfg.mode == "unilateral" else min(side1, side2)
                if d > limit:
                    raise ParameterError(f"dimension {d} exceeds image side limit {limit}")


def _is_2d(name: str) -> bool:
    return name in embed_2d.METHOD_NAMES_2D


def run_cell(
    cfg: ExperimentConfig,
    ds: ImageDataset,
    method: str,
    dim: int,
    realization: int,
) -> tuple[float, float]:
    """Fit, project, classify one cell; returns (error, fit_seconds)."""
    train_idx, test_idx = split_dataset(ds, cfg.train_per_class, cfg.seed, realization)
    started = time.perf_counter()
    if _is_2d(method):
        train = matrix_dataset(ds, train_idx)
        x = train.tensor
        pre_pair = None
        if cfg.pre_dims is not None and method not in ("GLRAM", "2D-PCA"):
            x, pre_pair = embed_2d.pre_process_2dpca(x, cfg.pre_dims, cfg.max_iter)
        reduced_ds = embed_2d.MatrixDataset(x, train.labels)
        spec = embed_2d.method_matrices(
            method, reduced_ds, knn=cfg.knn, beta=cfg.beta, bandwidth=cfg.bandwidth
        )
        if cfg.mode == "unilateral":
            pair, _ = embed_2d.fit_unilateral(x, spec, "right", dim)
        else:
            pair, _ = embed_2d.fit_method(x, spec, dim, dim, cfg.max_iter)
        if pre_pair is not None:
            pair = embed_2d.compose_pairs(pre_pair, pair)
        elapsed = time.perf_counter() - started
        full_train = matrix_dataset(ds, train_idx)
        gallery = recognize.build_gallery(full_train.tensor, pair, full_train.labels)
        queries = matrix_dataset(ds, test_idx)
        predictions = recognize.classify_batch(recognize.project_tensor(queries.tensor, pair), gallery)
        return recognize.error_rate(predictions, queries.labels), elapsed

    train = vector_dataset(ds, train_idx)
    predim = cfg.pca_predim if cfg.pca_predim is not None else "auto"
    projector = embed_1d.fit_1d(
        train,
        method,
        dim,
        knn=cfg.knn,
        bandwidth=cfg.bandwidth,
        beta=cfg.beta,
        pca_predim=None if method == "PCA" else predim,
    )
    elapsed = time.perf_counter() - started
    projected_train = projector.transform(train.data)
    test = vector_dataset(ds, test_idx)
    projected_test = projector.transform(test.data)
    gallery = recognize.GallerySet(
        Tensor3(projected_train[:, None, :]), train.labels
    )
    predictions = np.asarray(
        [recognize.classify_1nn(projected_test[:, [k]], gallery) for k in range(test.labels.size)]
    )
    return recognize.error_rate(predictions, test.labels), elapsed


def run_experiment(cfg: ExperimentConfig, dataset: ImageDataset | None = None) -> ResultTable:
    """Run the full protocol and aggregate per-cell errors.

    A cell whose fit aborts with a package error is recorded as a failure
    and the run continues; aggregates are over the surviving
    realizations (NaN if none survive).
    """
    ds = dataset if dataset is not None else load_dataset(cfg.dataset, cfg.resize)
    _validate_config(cfg, ds)

    cells = [
        (method, dim, r)
        for method in cfg.methods
        for dim in cfg.dims
        for r in range(cfg.realizations)
    ]

    def task(cell):
        method, dim, r = cell
        try:
            err, secs = run_cell(cfg, ds, method, dim, r)
            return cell, err, secs, None
        except (Repel2dError, np.linalg.LinAlgError) as exc:
            return cell, None, None, f"{type(exc).__name__}: {exc}"

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            outcomes = list(pool.map(task, cells))
    else:
        outcomes = [task(c) for c in cells]

    logs: dict[tuple[str, str, int], dict] = {}
    for (method, dim, r), err, secs, failure in sorted(
        outcomes, key=lambda o: (o[0][0], o[0][1], o[0][2])
    ):
        mode = _mode_label(cfg, method)
        record = logs.setdefault(
            (method, mode, dim), {"errors": [], "seconds": [], "failures": []}
        )
        if failure is None:
            record["errors"].append(err)
            record["seconds"].append(secs)
        else:
            record["failures"].append({"realization": r, "reason": failure})

    table = ResultTable()
    for method in cfg.methods:
        mode = _mode_label(cfg, method)
        for dim in cfg.dims:
            record = logs[(method, mode, dim)]
            errors = record["errors"]
            table.rows.append(
                ResultRow(
                    method=method,
                    mode=mode,
                    dimension=dim,
                    mean_error=float(np.mean(errors)) if errors else math.nan,
                    std_error=float(np.std(errors)) if errors else math.nan,
                    mean_fit_seconds=float(np.mean(record["seconds"])) if errors else math.nan,
                )
            )
    table.metadata = {
        "artifact_version": __version__,
        "dataset": str(cfg.dataset) or ds.name,
        "image_shape": list(ds.image_shape),
        "classes": len(ds.class_names),
        "config": _jsonable_config(cfg),
        "bandwidth_rule": "mean squared label-edge distance, shared with repulsion weights",
        "per_cell": {
            f"{m}|{mo}|{d}": rec for (m, mo, d), rec in sorted(logs.items())
        },
    }
    return table


def _mode_label(cfg: ExperimentConfig, method: str) -> str:
    return cfg.mode if _is_2d(method) else "vector"


def _jsonable_config(cfg: ExperimentConfig) -> dict:
    raw = asdict(cfg)
    raw["dataset"] = str(raw["dataset"])
    return raw


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def emit_csv(table: ResultTable, path) -> Path:
    """Write the result table as CSV: one row per (method, mode, dimension),
    6 significant digits, dot decimal point regardless of locale."""
    path = Path(path)
    lines = [CSV_HEADER]
    for row in table.rows:
        lines.append(
            f"{row.method},{row.mode},{row.dimension},"
            f"{_fmt(row.mean_error)},{_fmt(row.std_error)},{_fmt(row.mean_fit_seconds)}"
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def parse_result_csv(path) -> list[ResultRow]:
    """Read back a CSV written by :func:`emit_csv`."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ParameterError(f"{path} does not carry the expected result header")
    rows = []
    for line in lines[1:]:
        method, mode, dim, mean, std, secs = line.split(",")
        rows.append(ResultRow(method, mode, int(dim), float(mean), float(std), float(secs)))
    return rows


def emit_plotdata(table: ResultTable, out_dir) -> list[Path]:
    """Write one ``<method>_<mode>.dat`` series per method: lines of
    ``dimension mean_error`` sorted by dimension, ready for external plotting."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    series: dict[tuple[str, str], list[tuple[int, float]]] = {}
    for row in table.rows:
        series.setdefault((row.method, row.mode), []).append((row.dimension, row.mean_error))
    written = []
    for (method, mode), points in sorted(series.items()):
        safe = method.replace("/", "-")
        path = out / f"{safe}_{mode}.dat"
        body = "\n".join(f"{d} {_fmt(e)}" for d, e in sorted(points))
        path.write_text(body + "\n", encoding="ascii")
        written.append(path)
    return written


def write_metadata(table: ResultTable, path) -> Path:
    """Sidecar JSON with resolved parameters, seed, version, per-cell logs."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(table.metadata, indent=2, sort_keys=True) + "\n", encoding="ascii")
    return path
