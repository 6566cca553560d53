"""Command-line interface.

Subcommands:
  run    --config <json>                 run the experiment grid, write CSVs
  bounds --d --n --cprime --delta        print the three-term bound decomposition
  table1 [--cprime <float>]              print the sample-complexity scaling table
  qfim   --config <json> --point <csv>   batch-averaged QFIM spectrum at a point

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .bounds import k_complexity, rademacher_bound, required_samples
from .circuit import CircuitSpec
from .datasets import scale_features
from .errors import DataError, NumericError, UsageError
from .experiments import (
    TABLE_CONF_DELTA,
    TABLE_DIMENSIONS,
    _load_dataset,
    config_from_json,
    emit_results,
    run_experiment,
)
from .fisher import effective_dim_ipr, effective_dim_rank, qfim_batch_mean


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we map usage to 1
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qgbounds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the experiment grid from a JSON config")
    run_p.add_argument("--config", required=True, help="path to the JSON config")

    bounds_p = sub.add_parser("bounds", help="print a three-term bound decomposition")
    bounds_p.add_argument("--d", type=int, required=True)
    bounds_p.add_argument("--n", type=int, required=True)
    bounds_p.add_argument("--cprime", type=float, required=True)
    bounds_p.add_argument("--delta", type=float, required=True)

    table_p = sub.add_parser("table1", help="print the k(d)/N scaling table")
    table_p.add_argument("--cprime", type=float, default=1.0)

    qfim_p = sub.add_parser("qfim", help="QFIM spectrum at a parameter point")
    qfim_p.add_argument("--config", required=True)
    qfim_p.add_argument("--point", required=True, help="comma-separated angles, length d")
    return parser


def _cmd_run(args) -> int:
    config = config_from_json(args.config)
    rows = run_experiment(config)
    paths = emit_results(rows, config.out_dir)
    print(f"wrote {len(rows)} rows")
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def _cmd_bounds(args) -> int:
    if args.d < 1 or args.n < 1:
        raise UsageError("--d and --n must be >= 1")
    if not 0.0 < args.delta < 1.0:
        raise UsageError("--delta must lie in (0, 1)")
    complexity = 2.0 * rademacher_bound(args.d, args.n, args.cprime)
    confidence = 3.0 * math.sqrt(math.log(2.0 / args.delta) / (2.0 * args.n))
    print(f"complexity_term: {complexity:.9g}")
    print(f"confidence_term: {confidence:.9g}")
    print(f"bound_minus_risk: {complexity + confidence:.9g}")
    return 0


def _cmd_table1(args) -> int:
    print("d,k,N,third_term")
    for d in TABLE_DIMENSIONS:
        k = k_complexity(d, args.cprime)
        n = required_samples(d, args.cprime)
        third = 3.0 * math.sqrt(math.log(2.0 / TABLE_CONF_DELTA) / (2.0 * n))
        print(f"{d},{k:.9g},{n},{third:.9g}")
    return 0


def _cmd_qfim(args) -> int:
    config = config_from_json(args.config)
    try:
        theta = np.array([float(v) for v in args.point.split(",")])
    except ValueError as exc:
        raise UsageError(f"--point must be comma-separated floats: {exc}") from exc
    spec = CircuitSpec(
        n_qubits=config.n_qubits,
        n_layers=config.layers[0],
        noise_rate=config.noise_rates[0],
    )
    if theta.size != spec.d:
        raise UsageError(f"--point must have length d = {spec.d}, got {theta.size}")
    dataset = _load_dataset(config.dataset)
    features = dataset.features
    if config.dataset == "digits":
        from .datasets import pca_reduce

        features, _, _ = pca_reduce(features, 8)
    features = scale_features(features)
    fim = qfim_batch_mean(features, theta, spec)
    w = fim.eigenvalues
    print("eigenvalues:", ",".join(f"{v:.9g}" for v in w))
    print(f"rank: {effective_dim_rank(fim, 1e-10)}")
    print(f"ipr_effective_dimension: {effective_dim_ipr(np.maximum(w, 0.0)):.9g}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "bounds":
            return _cmd_bounds(args)
        if args.command == "table1":
            return _cmd_table1(args)
        return _cmd_qfim(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
