"""Command-line interface.

Subcommands: ``fit`` (train one projector and save it), ``eval`` (score
one method/dimension on a single split), ``bench`` (full protocol, CSV
output), ``sweep`` (bench plus per-method plot series).  Flags override a
flat ``key = value`` config file.  Exit codes: 0 success, 1 usage error,
2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import embed_2d, experiment
from .datasets import load_dataset, matrix_dataset, split_dataset
from .errors import (
    ContractError,
    DataError,
    DefinitenessError,
    NumericalQualityError,
    ParameterError,
    RankError,
    ShapeError,
)

USAGE_EXIT = 1
DATA_EXIT = 2
NUMERICAL_EXIT = 3

_CONFIG_KEYS = {
    "dataset",
    "methods",
    "method",
    "mode",
    "dims",
    "train_per_class",
    "realizations",
    "seed",
    "beta",
    "knn",
    "bandwidth",
    "pre_dims",
    "max_iter",
    "jobs",
    "resize",
    "out",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
    except ValueError as exc:
        raise ParameterError(f"expected comma-separated integers, got {text!r}") from exc


def read_config(path) -> dict:
    """Parse a flat ``key = value`` config file (# starts a comment)."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ParameterError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


def _build_parser() -> _Parser:
    parser = _Parser(prog="repel2d", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("fit", "fit one method and save the projector pair"),
        ("eval", "score one method at one dimension on a single split"),
        ("bench", "run the full protocol and write results.csv"),
        ("sweep", "bench plus per-method plot series files"),
    ):
        p = sub.add_parser(name, help=blurb)
        p.add_argument("--config", type=Path, default=None)
        p.add_argument("--dataset", type=Path, default=None)
        p.add_argument("--method", action="append", default=None, help="repeatable; commas allowed")
        p.add_argument("--mode", choices=("uni", "bi", "unilateral", "bilateral"), default=None)
        p.add_argument("--dims", type=str, default=None)
        p.add_argument("--train-per-class", type=int, default=None)
        p.add_argument("--realizations", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--beta", type=float, default=None)
        p.add_argument("--knn", type=int, default=None)
        p.add_argument("--bandwidth", type=float, default=None)
        p.add_argument("--pre-dims", type=str, default=None, help="p1,p2 for 2D-PCA pre-compression")
        p.add_argument("--max-iter", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--resize", type=str, default=None, help="h,w box-average resize at load")
        p.add_argument("--out", type=Path, default=None)
    return parser


_MODE_ALIASES = {"uni": "unilateral", "bi": "bilateral"}


def build_config(args: argparse.Namespace) -> tuple[experiment.ExperimentConfig, Path]:
    """Merge defaults, config file, and flags (flags win)."""
    file_values = read_config(args.config) if args.config else {}

    def pick(flag, key, convert):
        if flag is not None:
            return flag
        if key in file_values:
            return convert(file_values[key])
        return None

    methods: tuple[str, ...] | None = None
    if args.method:
        methods = tuple(tok for item in args.method for tok in item.split(",") if tok)
    elif "methods" in file_values or "method" in file_values:
        raw = file_values.get("methods", file_values.get("method", ""))
        methods = tuple(tok.strip() for tok in raw.split(",") if tok.strip())

    dataset = pick(args.dataset, "dataset", Path)
    if dataset is None:
        raise ParameterError("a dataset path is required (--dataset or config)")
    mode = pick(args.mode, "mode", str) or "unilateral"
    mode = _MODE_ALIASES.get(mode, mode)
    dims = pick(_int_list(args.dims) if args.dims else None, "dims", _int_list)
    pre = pick(_int_list(args.pre_dims) if args.pre_dims else None, "pre_dims", _int_list)
    resize = pick(_int_list(args.resize) if args.resize else None, "resize", _int_list)
    if pre is not None and len(pre) != 2:
        raise ParameterError(f"pre-dims needs exactly two integers, got {pre}")
    if resize is not None and len(resize) != 2:
        raise ParameterError(f"resize needs exactly two integers, got {resize}")

    seed = pick(args.seed, "seed", int)
    cfg = experiment.ExperimentConfig(
        dataset=str(dataset),
        methods=methods or ("2D-PCA",),
        mode=mode,
        dims=dims or (2, 4, 6, 8, 10),
        train_per_class=pick(args.train_per_class, "train_per_class", int) or 5,
        realizations=pick(args.realizations, "realizations", int) or 20,
        seed=0 if seed is None else seed,
        knn=pick(args.knn, "knn", int) or 6,
        beta=pick(args.beta, "beta", float),
        bandwidth=pick(args.bandwidth, "bandwidth", float),
        pre_dims=pre,
        max_iter=pick(args.max_iter, "max_iter", int) or 5,
        jobs=pick(args.jobs, "jobs", int) or 1,
        resize=resize,
    )
    out = pick(args.out, "out", Path) or Path("results")
    return cfg, Path(out)


def _cmd_fit(cfg: experiment.ExperimentConfig, out: Path) -> int:
    ds = load_dataset(cfg.dataset, cfg.resize)
    train_idx, _ = split_dataset(ds, cfg.train_per_class, cfg.seed, 0)
    train = matrix_dataset(ds, train_idx)
    method = cfg.methods[0]
    if method not in embed_2d.METHOD_NAMES_2D:
        raise ParameterError(f"fit saves matrix-method projectors; got {method!r}")
    spec = embed_2d.method_matrices(method, train, knn=cfg.knn, beta=cfg.beta, bandwidth=cfg.bandwidth)
    d = cfg.dims[0]
    if cfg.mode == "unilateral":
        pair, trace = embed_2d.fit_unilateral(train.tensor, spec, "right", d)
    else:
        pair, trace = embed_2d.fit_method(train.tensor, spec, d, d, cfg.max_iter)
    out.mkdir(parents=True, exist_ok=True)
    np.savez(out / "projector.npz", row_basis=pair.row_basis, col_basis=pair.col_basis)
    (out / "projector.json").write_text(
        json.dumps(
            {
                "method": method,
                "mode": cfg.mode,
                "dimension": d,
                "sides": pair.sides,
                "constraints": list(pair.constraints),
                "iterations": trace.iterations,
                "converged": trace.converged,
                "objectives": trace.objectives,
                "bandwidth": spec.bandwidth,
                "beta": spec.beta,
            },
            indent=2,
        )
        + "\n",
        encoding="ascii",
    )
    print(f"saved projector for {method} (d={d}, {cfg.mode}) to {out}")
    return 0


def _cmd_eval(cfg: experiment.ExperimentConfig, out: Path) -> int:
    ds = load_dataset(cfg.dataset, cfg.resize)
    method = cfg.methods[0]
    err, secs = experiment.run_cell(cfg, ds, method, cfg.dims[0], 0)
    print(f"{method} {cfg.mode} d={cfg.dims[0]} error={err:.6g} fit_seconds={secs:.6g}")
    return 0


def _cmd_bench(cfg: experiment.ExperimentConfig, out: Path, plots: bool) -> int:
    table = experiment.run_experiment(cfg)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = experiment.emit_csv(table, out / "results.csv")
    experiment.write_metadata(table, out / "results.meta.json")
    if plots:
        experiment.emit_plotdata(table, out / "plotdata")
    print(f"wrote {csv_path}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg, out = build_config(args)
        if args.command == "fit":
            return _cmd_fit(cfg, out)
        if args.command == "eval":
            return _cmd_eval(cfg, out)
        if args.command == "bench":
            return _cmd_bench(cfg, out, plots=False)
        return _cmd_bench(cfg, out, plots=True)
    except (ParameterError,) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (DataError, ShapeError, ContractError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return DATA_EXIT
    except (DefinitenessError, RankError, NumericalQualityError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_EXIT


if __name__ == "__main__":
    raise SystemExit(main())
