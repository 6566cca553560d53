"""Experiment grid: train, measure gaps, and evaluate the three risk bounds.

One grid cell is (dataset, n_layers, noise_rate, n_train, run).  Per cell the
harness trains the circuit, estimates the global constants (minimum Fisher
log-sqrt-determinant and maximum gradient norm over uniformly sampled
parameters), searches a stable local region around the trained point, and
writes one result row.  Everything is seeded; identical configs produce
byte-identical CSV output.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .bounds import (
    BoundInputs,
    effdim_bound,
    generalization_bound,
    k_complexity,
    local_bound,
    required_samples,
)
from .circuit import TWO_PI, CircuitSpec, ParameterSpace
from .datasets import (
    Dataset,
    apply_feature_scaler,
    fit_feature_scaler,
    load_digits,
    load_iris,
    pca_reduce,
    stratified_split,
)
from .errors import DataError
from .fisher import effective_dim_ipr, qfim_batch_mean
from .gradients import model_gradients_batch
from .linalg import psd_log_sqrt_det
from .training import DatasetSplit, TrainConfig, train

logger = logging.getLogger(__name__)

DET_FLOOR = 1e-12  # per-eigenvalue floor when taking log determinants
GRADIENT_FLOOR = 1e-12  # keeps Lipschitz estimates positive for the bound
PCA_COMPONENTS = 8  # digits features are reduced to this many dimensions
TABLE_DIMENSIONS = (1, 10, 100, 1000, 10000, 50000, 100000)
TABLE_CONF_DELTA = 0.005

RESULT_HEADER = [
    "dataset",
    "run",
    "seed",
    "n_layers",
    "p",
    "N_train",
    "train_risk",
    "test_risk",
    "gap",
    "global_bound",
    "local_bound",
    "effdim_bound",
    "radius_delta",
    "log_m_loc",
    "L_loc",
    "d_eff_ipr",
]

AGGREGATE_METRICS = ["train_risk", "test_risk", "gap", "global_bound", "local_bound", "effdim_bound"]

CONFIG_KEYS = {
    "dataset",
    "n_qubits",
    "layers",
    "noise_rates",
    "train_sizes",
    "epochs",
    "n_runs",
    "base_seed",
    "conf_delta",
    "alpha",
    "learning_rate",
    "pinv_cutoff",
    "out_dir",
}

__all__ = [
    "LocalRegion",
    "ExperimentConfig",
    "ResultRow",
    "config_from_json",
    "local_region_search",
    "local_lipschitz",
    "run_experiment",
    "emit_results",
]


@dataclass(frozen=True)
class LocalRegion:
    """A hypercube of radius radius_delta around the trained parameters."""

    center: np.ndarray
    radius_delta: float
    log_v_loc: float
    log_m_loc: float
    alpha: float
    l_loc: float | None = None
    degenerate: bool = False

    def __post_init__(self):
        if not self.alpha < self.radius_delta <= TWO_PI + 1e-12:
            raise ValueError(
                f"radius must satisfy alpha < delta <= 2pi, got alpha={self.alpha}, "
                f"delta={self.radius_delta}"
            )


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    out_dir: str = "results"
    n_qubits: int = 2
    layers: tuple[int, ...] = (2,)
    noise_rates: tuple[float, ...] = (0.05, 0.1, 0.5)
    train_sizes: tuple[int, ...] = (20, 40, 60, 80)
    epochs: int = 20
    n_runs: int = 3
    base_seed: int = 7
    conf_delta: float = 0.05
    alpha: float = 0.5
    learning_rate: float = 0.1
    pinv_cutoff: float = 1e-8

    def __post_init__(self):
        if self.dataset not in ("iris", "digits"):
            raise ValueError(f"dataset must be 'iris' or 'digits', got {self.dataset!r}")
        for name in ("layers", "noise_rates", "train_sizes"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"{name} sweep must not be empty")
        if not 0.0 < self.conf_delta < 1.0:
            raise ValueError(f"conf_delta must lie in (0, 1), got {self.conf_delta}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class ResultRow:
    dataset: str
    run: int
    seed: int
    n_layers: int
    p: float
    n_train: int
    train_risk: float
    test_risk: float
    gap: float
    global_bound: float
    local_bound: float
    effdim_bound: float
    radius_delta: float
    log_m_loc: float
    l_loc: float
    d_eff_ipr: float


def config_from_json(source) -> ExperimentConfig:
    """Build an ExperimentConfig from a JSON file path or a parsed dict.

    Unknown keys are rejected; array-valued sweeps become tuples.
    """
    if isinstance(source, (str, Path)):
        try:
            doc = json.loads(Path(source).read_text(encoding="utf-8"))
        except OSError as exc:
            raise DataError(f"cannot read config {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid JSON in {source}: {exc}") from exc
    else:
        doc = dict(source)
    if not isinstance(doc, dict):
        raise DataError("config document must be a JSON object")
    unknown = sorted(set(doc) - CONFIG_KEYS)
    if unknown:
        raise DataError(f"unknown config keys: {', '.join(unknown)}")
    for key in ("layers", "noise_rates", "train_sizes"):
        if key in doc:
            doc[key] = tuple(doc[key])
    try:
        return ExperimentConfig(**doc)
    except (TypeError, ValueError) as exc:
        raise DataError(f"invalid config: {exc}") from exc


def _search_region(
    quantity: Callable[[np.ndarray], float],
    center: np.ndarray,
    alpha: float,
    rng: np.random.Generator,
    n_boundary: int,
    n_interior: int,
) -> LocalRegion:
    """Grow a hypercube while the boundary minimum of ``quantity`` stays above
    ln(alpha) plus its value at the center.

    Per boundary point the generator draws, in order: uniform(-1, 1, d), a
    coordinate index via integers(d), and a sign via integers(2).  Interior
    points draw uniform(-1, 1, d) each.
    """
    center = np.asarray(center, dtype=float)
    d = center.size
    q_center = quantity(center)
    target = math.log(alpha) + q_center

    def boundary_minimum(delta: float) -> float:
        worst = math.inf
        for _ in range(n_boundary):
            u = rng.uniform(-1.0, 1.0, size=d)
            j = int(rng.integers(d))
            u[j] = 1.0 if int(rng.integers(2)) else -1.0
            worst = min(worst, quantity(center + delta * u))
        return worst

    delta = alpha + 1e-3
    degenerate = False
    if boundary_minimum(delta) < target:
        degenerate = True
    else:
        while delta < TWO_PI:
            candidate = min(2.0 * delta, TWO_PI)
            if boundary_minimum(candidate) >= target:
                delta = candidate
            else:
                break
    samples = [q_center]
    for _ in range(n_interior):
        samples.append(quantity(center + delta * rng.uniform(-1.0, 1.0, size=d)))
    return LocalRegion(
        center=center,
        radius_delta=delta,
        log_v_loc=d * math.log(2.0 * delta),
        log_m_loc=min(samples),
        alpha=alpha,
        degenerate=degenerate,
    )


def local_region_search(
    theta_hat: np.ndarray,
    spec: CircuitSpec,
    batch_x: np.ndarray,
    alpha: float,
    *,
    n_boundary: int = 16,
    n_interior: int = 32,
    seed: int = 0,
    criterion: str = "logdet",
    det_floor: float = DET_FLOOR,
    spectrum_sink: list | None = None,
) -> LocalRegion:
    """Continuity-based radius search on the batch-averaged quantum Fisher matrix.

    ``criterion`` selects the monitored quantity: "logdet" tracks the
    log-sqrt-determinant, "min_eig" the log of the smallest eigenvalue (both
    floored at ``det_floor``).  The region degenerates to the minimal radius
    alpha + 1e-3, with a flag, when even that radius fails the criterion.
    """
    if criterion not in ("logdet", "min_eig"):
        raise ValueError(f"criterion must be 'logdet' or 'min_eig', got {criterion!r}")
    if not 0.0 < alpha < TWO_PI:
        raise ValueError(f"alpha must lie in (0, 2pi), got {alpha}")

    def quantity(theta: np.ndarray) -> float:
        fim = qfim_batch_mean(batch_x, theta, spec)
        if spectrum_sink is not None:
            spectrum_sink.append(fim.eigenvalues)
        if criterion == "logdet":
            return psd_log_sqrt_det(fim.matrix.astype(complex), det_floor)
        w = fim.eigenvalues
        return math.log(max(float(w[0]), det_floor))

    rng = np.random.default_rng(seed)
    return _search_region(quantity, theta_hat, alpha, rng, n_boundary, n_interior)


def local_lipschitz(
    theta_hat: np.ndarray,
    region: LocalRegion,
    spec: CircuitSpec,
    batch_x: np.ndarray,
    k: int = 32,
    seed: int = 0,
) -> float:
    """Max gradient 2-norm over k hypercube samples (center included) and all inputs."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    theta_hat = np.asarray(theta_hat, dtype=float)
    rng = np.random.default_rng(seed)
    points = [theta_hat]
    for _ in range(k - 1):
        points.append(theta_hat + region.radius_delta * rng.uniform(-1.0, 1.0, theta_hat.size))
    worst = 0.0
    for theta in points:
        grads = model_gradients_batch(batch_x, theta, spec)
        worst = max(worst, float(np.max(np.linalg.norm(grads, axis=1))))
    return worst


def _load_dataset(name: str) -> Dataset:
    return load_iris() if name == "iris" else load_digits()


def _prepare_features(
    dataset: Dataset, train_idx: np.ndarray, test_idx: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell feature pipeline: optional PCA and min-max scaling, fit on train only."""
    train_x = dataset.features[train_idx]
    test_x = dataset.features[test_idx]
    if dataset.name == "digits":
        train_x, projection, mean = pca_reduce(train_x, PCA_COMPONENTS)
        test_x = (test_x - mean) @ projection
    col_min, col_span = fit_feature_scaler(train_x)
    train_x = apply_feature_scaler(train_x, col_min, col_span, clip=False)
    test_x = apply_feature_scaler(test_x, col_min, col_span, clip=True)
    return train_x, test_x


def _nan_row(config: ExperimentConfig, run: int, seed: int, n_layers: int, p: float, n_train: int):
    nan = float("nan")
    return ResultRow(
        dataset=config.dataset,
        run=run,
        seed=seed,
        n_layers=n_layers,
        p=p,
        n_train=n_train,
        train_risk=nan,
        test_risk=nan,
        gap=nan,
        global_bound=nan,
        local_bound=nan,
        effdim_bound=nan,
        radius_delta=nan,
        log_m_loc=nan,
        l_loc=nan,
        d_eff_ipr=nan,
    )


def _run_cell(
    config: ExperimentConfig,
    dataset: Dataset,
    n_layers: int,
    p: float,
    n_train: int,
    run: int,
    seeds: np.ndarray,
    global_samples: int,
    boundary_samples: int,
    interior_samples: int,
    lipschitz_samples: int,
    spectrum_sink: list | None,
) -> ResultRow:
    split_seed, train_seed, bounds_seed, region_seed, lip_seed = (int(s) for s in seeds)
    train_idx, test_idx = stratified_split(dataset, n_train, np.random.default_rng(split_seed))
    train_x, test_x = _prepare_features(dataset, train_idx, test_idx)
    split = DatasetSplit(
        train_x=train_x,
        train_y=dataset.labels[train_idx],
        test_x=test_x,
        test_y=dataset.labels[test_idx],
    )
    spec = CircuitSpec(n_qubits=config.n_qubits, n_layers=n_layers, noise_rate=p)
    result = train(
        split,
        spec,
        TrainConfig(
            epochs=config.epochs,
            learning_rate=config.learning_rate,
            pinv_cutoff=config.pinv_cutoff,
            n_runs=1,
            base_seed=train_seed,
            noise_rate=p,
        ),
    )
    theta_hat = result.theta_hat[0]
    train_risk = float(result.train_risk[0])
    test_risk = float(result.test_risk[0])
    gap = float(result.gap[0])

    rng = np.random.default_rng(bounds_seed)
    log_m = math.inf
    lipschitz = 0.0
    for _ in range(global_samples):
        theta = rng.uniform(-TWO_PI, TWO_PI, size=spec.d)
        fim = qfim_batch_mean(train_x, theta, spec)
        if spectrum_sink is not None:
            spectrum_sink.append(fim.eigenvalues)
        log_m = min(log_m, psd_log_sqrt_det(fim.matrix.astype(complex), DET_FLOOR))
        grads = model_gradients_batch(train_x, theta, spec)
        lipschitz = max(lipschitz, float(np.max(np.linalg.norm(grads, axis=1))))
    inputs = BoundInputs(
        d=spec.d,
        n_samples=n_train,
        conf_delta=config.conf_delta,
        log_v_theta=ParameterSpace(spec.d).log_volume,
        log_m=log_m,
        l_f_p=max(lipschitz, GRADIENT_FLOOR),
        empirical_risk=train_risk,
    )
    global_report = generalization_bound(inputs)

    region = local_region_search(
        theta_hat,
        spec,
        train_x,
        config.alpha,
        n_boundary=boundary_samples,
        n_interior=interior_samples,
        seed=region_seed,
        spectrum_sink=spectrum_sink,
    )
    l_loc = max(
        local_lipschitz(theta_hat, region, spec, train_x, k=lipschitz_samples, seed=lip_seed),
        GRADIENT_FLOOR,
    )
    region = dataclasses.replace(region, l_loc=l_loc)
    local_report = local_bound(inputs, region.log_v_loc, region.log_m_loc, l_loc)

    fim_hat = qfim_batch_mean(train_x, theta_hat, spec)
    if spectrum_sink is not None:
        spectrum_sink.append(fim_hat.eigenvalues)
    d_eff = float(np.clip(effective_dim_ipr(np.maximum(fim_hat.eigenvalues, 0.0)), 1.0, spec.d))
    effdim_report = effdim_bound(inputs, d_eff, local_report.c_prime)

    return ResultRow(
        dataset=config.dataset,
        run=run,
        seed=train_seed,
        n_layers=n_layers,
        p=p,
        n_train=n_train,
        train_risk=train_risk,
        test_risk=test_risk,
        gap=gap,
        global_bound=global_report.bound,
        local_bound=local_report.bound,
        effdim_bound=effdim_report.bound,
        radius_delta=region.radius_delta,
        log_m_loc=region.log_m_loc,
        l_loc=l_loc,
        d_eff_ipr=d_eff,
    )


def run_experiment(
    config: ExperimentConfig,
    *,
    global_samples: int = 64,
    boundary_samples: int = 16,
    interior_samples: int = 32,
    lipschitz_samples: int = 32,
    spectrum_sink: list | None = None,
) -> list[ResultRow]:
    """Run the full grid; one row per (layers, noise, size, run) cell.

    A failing cell is logged and recorded as a row of NaNs so the remaining
    cells still run.  ``spectrum_sink``, when given, collects the eigenvalues
    of every batch-averaged quantum Fisher matrix the bound machinery sees.
    """
    dataset = _load_dataset(config.dataset)
    rows: list[ResultRow] = []
    for li, n_layers in enumerate(config.layers):
        for pi, p in enumerate(config.noise_rates):
            for ni, n_train in enumerate(config.train_sizes):
                for run in range(config.n_runs):
                    root = np.random.SeedSequence([config.base_seed, li, pi, ni, run])
                    seeds = root.generate_state(5)
                    try:
                        rows.append(
                            _run_cell(
                                config,
                                dataset,
                                n_layers,
                                p,
                                n_train,
                                run,
                                seeds,
                                global_samples,
                                boundary_samples,
                                interior_samples,
                                lipschitz_samples,
                                spectrum_sink,
                            )
                        )
                    except Exception:
                        logger.warning(
                            "cell failed: layers=%s p=%s n_train=%s run=%s",
                            n_layers,
                            p,
                            n_train,
                            run,
                            exc_info=True,
                        )
                        rows.append(_nan_row(config, run, int(seeds[1]), n_layers, p, n_train))
    return rows


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def emit_results(rows: Sequence[ResultRow], out_dir) -> dict[str, Path]:
    """Write results.csv, aggregate.csv (mean/std over runs), and table1.csv."""
    if not rows:
        raise ValueError("no rows to emit")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    results_path = out / "results.csv"
    lines = [",".join(RESULT_HEADER)]
    for row in rows:
        lines.append(",".join(_fmt(getattr(row, f.name)) for f in fields(ResultRow)))
    results_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    aggregate_path = out / "aggregate.csv"
    header = ["dataset", "n_layers", "p", "N_train", "n_runs"]
    for metric in AGGREGATE_METRICS:
        header += [f"{metric}_mean", f"{metric}_std"]
    agg_lines = [",".join(header)]
    groups: dict[tuple, list[ResultRow]] = {}
    for row in rows:
        groups.setdefault((row.dataset, row.n_layers, row.p, row.n_train), []).append(row)
    for key, members in groups.items():
        valid = [r for r in members if math.isfinite(r.gap)]
        cells = [key[0], key[1], key[2], key[3], len(valid)]
        for metric in AGGREGATE_METRICS:
            vals = np.array([getattr(r, metric) for r in valid], dtype=float)
            if vals.size:
                cells += [float(vals.mean()), float(vals.std())]
            else:
                cells += [float("nan"), float("nan")]
        agg_lines.append(",".join(_fmt(c) for c in cells))
    aggregate_path.write_text("\n".join(agg_lines) + "\n", encoding="utf-8")

    table_path = out / "table1.csv"
    table_lines = ["d,k,N,third_term"]
    for d in TABLE_DIMENSIONS:
        k = k_complexity(d, 1.0)
        n = required_samples(d, 1.0)
        third = 3.0 * math.sqrt(math.log(2.0 / TABLE_CONF_DELTA) / (2.0 * n))
        table_lines.append(f"{d},{k:.9g},{n},{third:.9g}")
    table_path.write_text("\n".join(table_lines) + "\n", encoding="utf-8")

    return {"results": results_path, "aggregate": aggregate_path, "table1": table_path}
