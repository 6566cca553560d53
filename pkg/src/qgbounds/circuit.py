"""The variational circuit: angle encoding, noise barriers, layered ansatz.

Circuit order: encode -> barrier -> [Rot per qubit -> ring of CNOTs] per layer
-> barrier -> measure Z on qubit 0.  Parameters are consumed layer-major,
qubit-major, angle-minor; each Rot(a, b, g) = RZ(g) RY(b) RZ(a) takes three
Euler angles, so d = n_layers * n_qubits * 3.

Each noise barrier is a full-register depolarizing channel
rho -> (1-p) rho + p I/2^n.  Because the measured observable is traceless,
every barrier multiplies the model output by exactly (1-p); with k0 barriers
the noisy model factorizes as f_p = (1-p)^k0 * f_0 for every depth and input.

Functions ending in ``_batch`` evaluate a whole feature matrix at once and
are the hot path; the scalar operations route through the explicit
Kraus-channel machinery in :mod:`qgbounds.sim`.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import sim
from .linalg import kron

TWO_PI = 2.0 * np.pi

__all__ = [
    "CircuitSpec",
    "ParameterSpace",
    "eta_factor",
    "rot_gate",
    "encode",
    "forward_noisy",
    "model_value",
    "predict_probability",
    "predict_label",
    "encoded_states_batch",
    "prefix_density_batch",
    "evolve_density_batch",
    "forward_batch",
    "model_values_batch",
    "pure_states_batch",
    "random_parameters",
]


@dataclass(frozen=True)
class CircuitSpec:
    """Immutable description of the ansatz and its noise placement.

    ``noise_barriers`` lists barrier slots: slot 0 sits after the encoding,
    slot k (1-based) after layer k's entangler.  The default is the pair
    (0, n_layers); per-layer noise is available by listing every slot.
    """

    n_qubits: int
    n_layers: int
    noise_rate: float = 0.0
    noise_barriers: tuple[int, ...] | None = None
    params_per_rot: int = 3

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if self.n_layers < 1:
            raise ValueError(f"n_layers must be >= 1, got {self.n_layers}")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError(f"noise_rate must lie in [0, 1], got {self.noise_rate}")
        if self.params_per_rot != 3:
            raise ValueError("rotations take exactly three Euler angles")
        if self.noise_barriers is None:
            object.__setattr__(self, "noise_barriers", (0, self.n_layers))
        barriers = tuple(sorted(set(int(b) for b in self.noise_barriers)))
        if barriers and not (0 <= barriers[0] and barriers[-1] <= self.n_layers):
            raise ValueError(f"barrier slots must lie in 0..{self.n_layers}, got {barriers}")
        object.__setattr__(self, "noise_barriers", barriers)

    @property
    def d(self) -> int:
        return self.n_layers * self.n_qubits * self.params_per_rot

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def k0(self) -> int:
        """Number of noise barriers acting on the measured qubit (all of them)."""
        return len(self.noise_barriers)

    @property
    def measured_observable(self) -> np.ndarray:
        return sim.op_on_qubit(sim.PAULI_Z, 0, self.n_qubits)


@dataclass(frozen=True)
class ParameterSpace:
    """The training hypercube [-2pi, 2pi]^d with its log-volume."""

    d: int
    lower: float = -TWO_PI
    upper: float = TWO_PI

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")

    @property
    def log_volume(self) -> float:
        return self.d * np.log(self.upper - self.lower)


def eta_factor(p: float, k0: int) -> float:
    """Multiplicative noise attenuation (1-p)^k0 of the model output."""
    return (1.0 - p) ** k0


def random_parameters(d: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-TWO_PI, TWO_PI, size=d)


def rot_gate(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """ZYZ Euler rotation RZ(gamma) RY(beta) RZ(alpha); RZ(alpha) acts first."""
    return sim.rz(gamma) @ sim.ry(beta) @ sim.rz(alpha)


@functools.lru_cache(maxsize=None)
def _entangler(n_qubits: int) -> np.ndarray:
    """Ring of CNOTs: CNOT(q -> q+1 mod n) applied for q = 0, 1, ..., n-1."""
    dim = 2**n_qubits
    u = np.eye(dim, dtype=complex)
    if n_qubits == 1:
        return u
    p0 = np.array([[1, 0], [0, 0]], dtype=complex)
    p1 = np.array([[0, 0], [0, 1]], dtype=complex)
    for q in range(n_qubits):
        target = (q + 1) % n_qubits
        cnot = sim.op_on_qubit(p0, q, n_qubits) + sim.op_on_qubit(p1, q, n_qubits) @ sim.op_on_qubit(
            sim.PAULI_X, target, n_qubits
        )
        u = cnot @ u
    return u


def _layer_unitary(theta: np.ndarray, spec: CircuitSpec, layer: int) -> np.ndarray:
    n = spec.n_qubits
    offset = layer * n * 3
    rots = rot_gate(*theta[offset : offset + 3])
    for q in range(1, n):
        rots = kron(rots, rot_gate(*theta[offset + 3 * q : offset + 3 * q + 3]))
    return _entangler(n) @ rots


def _check_theta(theta: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.d,):
        raise ValueError(f"expected {spec.d} parameters, got shape {theta.shape}")
    return theta


# --- scalar operations (explicit Kraus route) ---------------------------------


def encode(x: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    """Angle-encode scaled features (expected in [0, pi]) into a pure state.

    Feature i (1-based) is applied to qubit (i-1) mod n_qubits as RX(x_i) for
    odd i and RY(x_i) for even i, in index order, re-uploading once features
    outnumber qubits.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size == 0:
        raise ValueError("cannot encode an empty feature sequence")
    psi = sim.zero_state(spec.n_qubits)
    for i, xi in enumerate(x):
        gate = sim.rx(xi) if i % 2 == 0 else sim.ry(xi)
        psi = sim.op_on_qubit(gate, i % spec.n_qubits, spec.n_qubits) @ psi
    return psi


def forward_noisy(x: np.ndarray, theta: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    """Density matrix of the circuit output, with barriers applied as Kraus sums."""
    theta = _check_theta(theta, spec)
    rho = sim.density_from_pure(encode(x, spec))
    barrier = None
    if spec.noise_barriers:
        barrier = sim.depolarizing_barrier(spec.noise_rate, spec.n_qubits)
    if barrier is not None and 0 in spec.noise_barriers:
        rho = sim.apply_channel(rho, barrier)
    for layer in range(spec.n_layers):
        rho = sim.apply_unitary(rho, _layer_unitary(theta, spec, layer))
        if barrier is not None and (layer + 1) in spec.noise_barriers:
            rho = sim.apply_channel(rho, barrier)
    return rho


def model_value(x: np.ndarray, theta: np.ndarray, spec: CircuitSpec) -> float:
    """f_{theta,p}(x) = Tr[(Z x I x ...) rho], in [-(1-p)^k0, (1-p)^k0]."""
    return sim.expectation(forward_noisy(x, theta, spec), spec.measured_observable)


def predict_probability(x: np.ndarray, theta: np.ndarray, spec: CircuitSpec) -> float:
    """Probability of outcome +1; equals Tr[M_+1 rho] for the qubit-0 POVM."""
    return (1.0 + model_value(x, theta, spec)) / 2.0


def predict_label(p_hat: float) -> int:
    """+1 when p_hat >= 0.5, else -1 (boundary inclusive)."""
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p_hat}")
    return 1 if p_hat >= 0.5 else -1


# --- batched engine ------------------------------------------------------------


def _as_feature_matrix(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] == 0:
        raise ValueError(f"expected a nonempty (n_samples, n_features) matrix, got {x.shape}")
    return x


def _apply_gate_batch(psi: np.ndarray, gates: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    n = psi.shape[0]
    left = 2**qubit
    right = 2 ** (n_qubits - qubit - 1)
    psi = psi.reshape(n, left, 2, right)
    out = np.einsum("nab,nlbr->nlar", gates, psi)
    return out.reshape(n, 2**n_qubits)


def encoded_states_batch(x: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    """Encoded pure states for every row of a feature matrix, shape (N, 2^n)."""
    x = _as_feature_matrix(x)
    n_samples = x.shape[0]
    psi = np.zeros((n_samples, spec.dim), dtype=complex)
    psi[:, 0] = 1.0
    for i in range(x.shape[1]):
        half = x[:, i] / 2.0
        c, s = np.cos(half), np.sin(half)
        gates = np.empty((n_samples, 2, 2), dtype=complex)
        if i % 2 == 0:  # RX
            gates[:, 0, 0] = c
            gates[:, 0, 1] = -1j * s
            gates[:, 1, 0] = -1j * s
            gates[:, 1, 1] = c
        else:  # RY
            gates[:, 0, 0] = c
            gates[:, 0, 1] = -s
            gates[:, 1, 0] = s
            gates[:, 1, 1] = c
        psi = _apply_gate_batch(psi, gates, i % spec.n_qubits, spec.n_qubits)
    return psi


def _barrier_batch(rho: np.ndarray, p: float, dim: int) -> np.ndarray:
    traces = np.einsum("nii->n", rho)
    eye = np.eye(dim, dtype=complex)
    return (1.0 - p) * rho + (p / dim) * traces[:, None, None] * eye


def prefix_density_batch(x: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    """Density matrices after encoding and the slot-0 barrier (theta-independent)."""
    psi = encoded_states_batch(x, spec)
    rho = np.einsum("ni,nj->nij", psi, psi.conj())
    if 0 in spec.noise_barriers:
        rho = _barrier_batch(rho, spec.noise_rate, spec.dim)
    return rho


def evolve_density_batch(prefix: np.ndarray, theta: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    """Apply the variational layers and remaining barriers to prefix densities."""
    theta = _check_theta(theta, spec)
    rho = prefix
    for layer in range(spec.n_layers):
        u = _layer_unitary(theta, spec, layer)
        rho = u @ rho @ u.conj().T
        if (layer + 1) in spec.noise_barriers:
            rho = _barrier_batch(rho, spec.noise_rate, spec.dim)
    return rho


def forward_batch(x: np.ndarray, theta: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    return evolve_density_batch(prefix_density_batch(x, spec), theta, spec)


def model_values_batch(
    x: np.ndarray, theta: np.ndarray, spec: CircuitSpec, prefix: np.ndarray | None = None
) -> np.ndarray:
    """Model outputs for every sample; ``prefix`` lets shift loops reuse encoding."""
    if prefix is None:
        prefix = prefix_density_batch(x, spec)
    rho = evolve_density_batch(prefix, theta, spec)
    return np.einsum("ij,nji->n", spec.measured_observable, rho).real


def pure_states_batch(x: np.ndarray, theta: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    """Noiseless output state vectors; requires noise_rate = 0."""
    if spec.noise_rate != 0.0:
        raise ValueError("pure-state evolution requires noise_rate = 0")
    theta = _check_theta(theta, spec)
    psi = encoded_states_batch(x, spec)
    for layer in range(spec.n_layers):
        u = _layer_unitary(theta, spec, layer)
        psi = psi @ u.T
    return psi
