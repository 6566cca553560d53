"""Mean-square-error training with natural gradient descent.

Optimization minimizes raw MSE on labels {-1, +1}; risk accounting uses the
rescaled loss ((y - f)/2)^2, which lives in [0, 1] with Lipschitz constant
<= 1 in f and equals MSE/4 (identical minimizers).  Each update preconditions
the loss gradient with the pseudo-inverse of the batch-averaged quantum
Fisher matrix and clamps parameters back into [-2pi, 2pi].
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .circuit import TWO_PI, CircuitSpec, model_values_batch, prefix_density_batch
from .errors import NumericError
from .fisher import FisherMatrix, qfim_batch_mean
from .gradients import model_gradients_batch
from .linalg import pseudo_inverse

__all__ = [
    "TrainConfig",
    "DatasetSplit",
    "TrainResult",
    "mse_loss",
    "bounded_loss",
    "loss_gradient",
    "natural_gradient_step",
    "train",
]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    learning_rate: float = 0.1
    pinv_cutoff: float = 1e-8
    n_runs: int = 3
    base_seed: int = 0
    noise_rate: float | None = None  # None: use the spec's rate

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.n_runs < 1:
            raise ValueError(f"n_runs must be >= 1, got {self.n_runs}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if self.pinv_cutoff <= 0:
            raise ValueError(f"pinv cutoff must be positive, got {self.pinv_cutoff}")


@dataclass(frozen=True)
class DatasetSplit:
    train_x: np.ndarray
    train_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray

    def __post_init__(self):
        for name in ("train", "test"):
            x = getattr(self, f"{name}_x")
            y = getattr(self, f"{name}_y")
            if x.ndim != 2 or x.shape[0] == 0:
                raise ValueError(f"{name} features must be a nonempty matrix, got {x.shape}")
            if y.shape != (x.shape[0],):
                raise ValueError(f"{name} labels shape {y.shape} does not match {x.shape}")
            if not np.all(np.isin(y, (-1, 1))):
                raise ValueError(f"{name} labels must be -1 or +1")
        if self.train_x.shape[1] != self.test_x.shape[1]:
            raise ValueError("train and test feature dimensions differ")


@dataclass(frozen=True)
class TrainResult:
    theta_hat: np.ndarray  # (n_runs, d)
    loss_curves: np.ndarray  # (n_runs, epochs), raw MSE after each update
    train_risk: np.ndarray  # (n_runs,), bounded loss at theta_hat
    test_risk: np.ndarray
    gap: np.ndarray  # |test - train|


def _check_batch(batch) -> tuple[np.ndarray, np.ndarray]:
    x, y = batch
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[0] == 0:
        raise ValueError("empty batch")
    if y.shape != (x.shape[0],):
        raise ValueError(f"labels shape {y.shape} does not match features {x.shape}")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    return x, y


def mse_loss(theta: np.ndarray, batch, spec: CircuitSpec) -> float:
    """Mean of (y - f)^2 over the batch."""
    x, y = _check_batch(batch)
    f = model_values_batch(x, theta, spec)
    return float(np.mean((y - f) ** 2))


def bounded_loss(theta: np.ndarray, batch, spec: CircuitSpec) -> float:
    """Mean of ((y - f)/2)^2: the [0, 1] risk used for bound comparisons."""
    x, y = _check_batch(batch)
    f = model_values_batch(x, theta, spec)
    return float(np.mean(((y - f) / 2.0) ** 2))


def loss_gradient(theta: np.ndarray, batch, spec: CircuitSpec) -> np.ndarray:
    """Gradient of mse_loss: mean of 2 (f - y) * grad f, parameter-shift inside."""
    x, y = _check_batch(batch)
    prefix = prefix_density_batch(x, spec)
    f = model_values_batch(x, theta, spec, prefix=prefix)
    grads = model_gradients_batch(x, theta, spec, prefix=prefix)
    return np.mean(2.0 * (f - y)[:, None] * grads, axis=0)


def natural_gradient_step(
    theta: np.ndarray,
    grad: np.ndarray,
    fisher: FisherMatrix | np.ndarray,
    learning_rate: float,
    cutoff: float,
) -> np.ndarray:
    """theta' = clamp(theta - lr * pinv(F, cutoff) @ grad) into [-2pi, 2pi]."""
    theta = np.asarray(theta, dtype=float)
    grad = np.asarray(grad, dtype=float)
    matrix = fisher.matrix if isinstance(fisher, FisherMatrix) else np.asarray(fisher, float)
    if matrix.shape != (theta.size, theta.size) or grad.shape != theta.shape:
        raise ValueError(
            f"dimension mismatch: theta {theta.shape}, grad {grad.shape}, fisher {matrix.shape}"
        )
    step = pseudo_inverse(matrix.astype(complex), cutoff).real @ grad
    return np.clip(theta - learning_rate * step, -TWO_PI, TWO_PI)


def train(split: DatasetSplit, spec: CircuitSpec, config: TrainConfig) -> TrainResult:
    """Full-batch natural-gradient training, deterministic given seeds.

    Run r draws theta0 uniformly from [-2pi, 2pi]^d with seed base_seed + r;
    after each epoch the raw MSE is recorded, and theta_hat is the
    post-update iterate with the lowest recorded loss.
    """
    if config.noise_rate is not None:
        spec = dataclasses.replace(spec, noise_rate=config.noise_rate)
    batch = (split.train_x, split.train_y)
    theta_hat = np.empty((config.n_runs, spec.d))
    curves = np.empty((config.n_runs, config.epochs))
    train_risk = np.empty(config.n_runs)
    test_risk = np.empty(config.n_runs)
    for r in range(config.n_runs):
        rng = np.random.default_rng(config.base_seed + r)
        theta = rng.uniform(-TWO_PI, TWO_PI, size=spec.d)
        candidates = np.empty((config.epochs, spec.d))
        for epoch in range(config.epochs):
            grad = loss_gradient(theta, batch, spec)
            fisher = qfim_batch_mean(split.train_x, theta, spec)
            theta = natural_gradient_step(
                theta, grad, fisher, config.learning_rate, config.pinv_cutoff
            )
            candidates[epoch] = theta
            curves[r, epoch] = mse_loss(theta, batch, spec)
        if not np.all(np.isfinite(curves[r])):
            raise NumericError(f"non-finite training loss in run {r}")
        best = int(np.argmin(curves[r]))
        theta_hat[r] = candidates[best]
        train_risk[r] = bounded_loss(theta_hat[r], batch, spec)
        test_risk[r] = bounded_loss(theta_hat[r], (split.test_x, split.test_y), spec)
    return TrainResult(
        theta_hat=theta_hat,
        loss_curves=curves,
        train_risk=train_risk,
        test_risk=test_risk,
        gap=np.abs(test_risk - train_risk),
    )
