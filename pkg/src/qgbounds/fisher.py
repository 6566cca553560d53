"""Classical and quantum Fisher information matrices and effective dimensions.

The classical matrix is built from the two-outcome measurement distribution;
the quantum matrix comes either from state derivatives (pure states) or from
the symmetric logarithmic derivative in the eigenbasis of the mixed state.
Support-restricted SLD: eigenvalue pairs with lambda_i + lambda_j below
``SLD_FLOOR`` contribute nothing.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .circuit import (
    CircuitSpec,
    forward_batch,
    model_values_batch,
    prefix_density_batch,
    pure_states_batch,
)
from .gradients import SHIFT, _shifted, density_derivatives_batch, model_gradients_batch
from .linalg import hermitian_eig

PROB_FLOOR = 1e-12
SLD_FLOOR = 1e-10

__all__ = [
    "PROB_FLOOR",
    "SLD_FLOOR",
    "FisherMatrix",
    "cfim",
    "cfim_batch_mean",
    "noisy_cfim_scaled",
    "qfim_pure",
    "qfim_mixed",
    "qfim_batch_mean",
    "effective_dim_ipr",
    "effective_dim_rank",
    "effective_dim_threshold",
]


@dataclass(frozen=True)
class FisherMatrix:
    """A d x d real symmetric Fisher matrix with its evaluation point."""

    kind: str  # "classical" or "quantum"
    matrix: np.ndarray
    theta: np.ndarray
    noise_rate: float
    inputs: np.ndarray | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"Fisher matrix must be square, got {m.shape}")
        if float(np.max(np.abs(m - m.T))) > 1e-9:
            raise ValueError("Fisher matrix must be symmetric")

    @property
    def eigenvalues(self) -> np.ndarray:
        w, _ = hermitian_eig(self.matrix.astype(complex))
        return w


def _symmetrize(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2.0


def _cfim_from_probs_and_grads(
    p_plus: np.ndarray, dp_plus: np.ndarray, prob_floor: float
) -> np.ndarray:
    """Mean over samples of sum_y (1/p_y) dp_y dp_y^T with p_- = 1 - p_+."""
    weights = 1.0 / np.maximum(p_plus, prob_floor) + 1.0 / np.maximum(1.0 - p_plus, prob_floor)
    f = np.einsum("n,ni,nj->ij", weights, dp_plus, dp_plus) / p_plus.shape[0]
    return _symmetrize(f)


def cfim(
    x: np.ndarray, theta: np.ndarray, spec: CircuitSpec, prob_floor: float = PROB_FLOOR
) -> FisherMatrix:
    """Classical Fisher matrix of the measured label distribution at one input."""
    x = np.atleast_1d(np.asarray(x, dtype=float))[None, :]
    f_vals = model_values_batch(x, theta, spec)
    p_plus = (1.0 + f_vals) / 2.0
    dp_plus = model_gradients_batch(x, theta, spec) / 2.0
    m = _cfim_from_probs_and_grads(p_plus, dp_plus, prob_floor)
    return FisherMatrix("classical", m, np.asarray(theta, float), spec.noise_rate, x[0])


def cfim_batch_mean(
    x: np.ndarray, theta: np.ndarray, spec: CircuitSpec, prob_floor: float = PROB_FLOOR
) -> FisherMatrix:
    """Arithmetic mean of per-sample classical Fisher matrices over a batch."""
    x = np.asarray(x, dtype=float)
    prefix = prefix_density_batch(x, spec)
    f_vals = model_values_batch(x, theta, spec, prefix=prefix)
    p_plus = (1.0 + f_vals) / 2.0
    dp_plus = model_gradients_batch(x, theta, spec, prefix=prefix) / 2.0
    m = _cfim_from_probs_and_grads(p_plus, dp_plus, prob_floor)
    return FisherMatrix("classical", m, np.asarray(theta, float), spec.noise_rate, x)


def noisy_cfim_scaled(x, theta, spec: CircuitSpec, eta, eta_prime) -> FisherMatrix:
    """Noisy classical Fisher matrix from noiseless probabilities.

    F_ij = sum_y (eta'(p_y)^2 / eta(p_y)) dp_y dp_y^T, where p_y and its
    derivatives are evaluated on the noiseless circuit and eta maps a
    noiseless outcome probability to its noisy counterpart.
    """
    clean = dataclasses.replace(spec, noise_rate=0.0)
    x = np.atleast_1d(np.asarray(x, dtype=float))[None, :]
    f_vals = model_values_batch(x, theta, clean)
    p_plus = float((1.0 + f_vals[0]) / 2.0)
    dp_plus = model_gradients_batch(x, theta, clean)[0] / 2.0
    m = np.zeros((spec.d, spec.d))
    for p_y, dp_y in ((p_plus, dp_plus), (1.0 - p_plus, -dp_plus)):
        eta_val = float(eta(p_y))
        if eta_val <= 0.0:
            raise ValueError(f"eta({p_y}) = {eta_val} must be positive")
        m += (float(eta_prime(p_y)) ** 2 / eta_val) * np.outer(dp_y, dp_y)
    return FisherMatrix("classical", _symmetrize(m), np.asarray(theta, float), spec.noise_rate, x[0])


def qfim_pure(x: np.ndarray, theta: np.ndarray, spec: CircuitSpec) -> FisherMatrix:
    """Quantum Fisher matrix of the noiseless pure output state.

    F_ij = 4 Re[<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>], with state
    derivatives from the pi/2 shift scaled by 1/(2 sqrt(2)), which is exact
    for G^2 = I generators and keeps the simulator's global phase consistent.
    """
    if spec.noise_rate != 0.0:
        raise ValueError("qfim_pure requires noise_rate = 0; use qfim_mixed instead")
    theta = np.asarray(theta, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))[None, :]
    psi = pure_states_batch(x, theta, spec)[0]
    dpsi = np.empty((spec.d, psi.size), dtype=complex)
    for j in range(spec.d):
        plus = pure_states_batch(x, _shifted(theta, j, SHIFT), spec)[0]
        minus = pure_states_batch(x, _shifted(theta, j, -SHIFT), spec)[0]
        dpsi[j] = (plus - minus) / (2.0 * np.sqrt(2.0))
    overlap = dpsi @ psi.conj()  # <psi|d_j psi>* = <d_j psi|psi>
    gram = dpsi.conj() @ dpsi.T
    m = 4.0 * np.real(gram - np.outer(overlap.conj(), overlap))
    return FisherMatrix("quantum", _symmetrize(m), theta, 0.0, x[0])


def _qfim_mean_from_densities(
    rho: np.ndarray, drho: np.ndarray, sld_floor: float
) -> np.ndarray:
    """Mean SLD quantum Fisher matrix over a batch of states.

    rho: (N, D, D); drho: (d, N, D, D).  In the eigenbasis of each state,
    F_ij = sum_ab 2 Re(D_i[a,b] conj(D_j[a,b])) / (w_a + w_b) restricted to
    eigenvalue pairs with w_a + w_b >= sld_floor.
    """
    w, v = hermitian_eig(rho)
    vh = np.conj(np.swapaxes(v, -1, -2))
    d_eig = np.einsum("nab,jnbc,ncd->jnad", vh, drho, v)
    pair_sums = w[:, :, None] + w[:, None, :]
    weights = np.where(pair_sums >= sld_floor, 2.0 / np.where(pair_sums > 0, pair_sums, 1.0), 0.0)
    f = np.einsum("jnab,knab,nab->jk", d_eig, d_eig.conj(), weights).real
    return _symmetrize(f / rho.shape[0])


def qfim_mixed(
    x: np.ndarray, theta: np.ndarray, spec: CircuitSpec, sld_floor: float = SLD_FLOOR
) -> FisherMatrix:
    """SLD quantum Fisher matrix of the (possibly mixed) output state at one input."""
    x = np.atleast_1d(np.asarray(x, dtype=float))[None, :]
    prefix = prefix_density_batch(x, spec)
    rho = forward_batch(x, theta, spec)
    drho = density_derivatives_batch(x, theta, spec, prefix=prefix)
    m = _qfim_mean_from_densities(rho, drho, sld_floor)
    return FisherMatrix("quantum", m, np.asarray(theta, float), spec.noise_rate, x[0])


def qfim_batch_mean(
    x: np.ndarray, theta: np.ndarray, spec: CircuitSpec, sld_floor: float = SLD_FLOOR
) -> FisherMatrix:
    """Arithmetic mean of per-sample quantum Fisher matrices over a batch."""
    x = np.asarray(x, dtype=float)
    prefix = prefix_density_batch(x, spec)
    rho = forward_batch(x, theta, spec)
    drho = density_derivatives_batch(x, theta, spec, prefix=prefix)
    m = _qfim_mean_from_densities(rho, drho, sld_floor)
    return FisherMatrix("quantum", m, np.asarray(theta, float), spec.noise_rate, x)


def effective_dim_ipr(eigenvalues: np.ndarray) -> float:
    """(sum w)^2 / sum w^2: participation-ratio effective dimension in [1, d]."""
    w = np.asarray(eigenvalues, dtype=float)
    if w.size == 0:
        raise ValueError("empty spectrum")
    if float(np.min(w)) < -1e-12:
        raise ValueError(f"negative eigenvalue {float(np.min(w)):.3e} in spectrum")
    w = np.maximum(w, 0.0)
    peak = float(np.max(w))
    if peak <= 0.0:
        raise ValueError("all-zero spectrum has no participation ratio")
    w = w / peak  # the ratio is scale-invariant; rescaling avoids underflow
    return float(np.sum(w)) ** 2 / float(np.sum(w**2))


def effective_dim_rank(f: FisherMatrix | np.ndarray, tol: float) -> int:
    """Number of eigenvalues exceeding ``tol``."""
    m = f.matrix if isinstance(f, FisherMatrix) else np.asarray(f, dtype=float)
    w, _ = hermitian_eig(m.astype(complex))
    return int(np.sum(w > tol))


def effective_dim_threshold(spectra, alpha: float) -> int:
    """Largest r such that the r-th (descending) eigenvalue is >= alpha in every spectrum."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    spectra = [np.asarray(s, dtype=float) for s in spectra]
    if not spectra:
        raise ValueError("no spectra supplied")
    counts = []
    for s in spectra:
        if s.size == 0:
            raise ValueError("empty spectrum supplied")
        if np.any(np.diff(s) > 1e-12):
            raise ValueError("spectra must be sorted in descending order")
        counts.append(int(np.sum(s >= alpha)))
    return min(counts)
