"""n-qubit states, unitaries, Kraus channels, and measurements.

States are numpy arrays: a pure state is a length-2^n complex vector with
unit norm, a density matrix is a 2^n x 2^n PSD Hermitian array with unit
trace.  Qubit 0 is the most significant bit of the computational-basis index,
so an operator acting on qubit 0 of two is ``kron(op, I)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import HERMITIAN_ATOL, hermitian_eig, kron, require_hermitian

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

UNITARY_ATOL = 1e-9
COMPLETENESS_ATOL = 1e-9
TRACE_ATOL = 1e-10
PROB_CLAMP_ATOL = 1e-10

__all__ = [
    "PAULI_I",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "rx",
    "ry",
    "rz",
    "op_on_qubit",
    "zero_state",
    "density_from_pure",
    "validate_pure_state",
    "validate_density",
    "apply_unitary",
    "KrausChannel",
    "apply_channel",
    "depolarizing",
    "depolarizing_barrier",
    "expectation",
    "Povm",
    "measurement_povm",
    "measure_probability",
]


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]])


def op_on_qubit(op: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """Embed a single-qubit operator at position ``qubit`` of an n-qubit register."""
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {n_qubits} qubits")
    left = np.eye(2**qubit, dtype=complex)
    right = np.eye(2 ** (n_qubits - qubit - 1), dtype=complex)
    return kron(kron(left, op), right)


def zero_state(n_qubits: int) -> np.ndarray:
    """|0...0> on n qubits."""
    psi = np.zeros(2**n_qubits, dtype=complex)
    psi[0] = 1.0
    return psi


def validate_pure_state(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = float(np.sum(np.abs(psi) ** 2))
    if abs(norm - 1.0) > TRACE_ATOL:
        raise ValueError(f"state is not normalized: |psi|^2 = {norm!r}")
    return psi


def density_from_pure(psi: np.ndarray) -> np.ndarray:
    psi = validate_pure_state(psi)
    return np.outer(psi, psi.conj())


def validate_density(rho: np.ndarray) -> np.ndarray:
    """Check Hermiticity, unit trace, and positivity of a density matrix."""
    rho = require_hermitian(rho, "density matrix")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    w, _ = hermitian_eig(rho)
    if float(np.min(w)) < -HERMITIAN_ATOL:
        raise ValueError(f"density matrix has negative eigenvalue {float(np.min(w)):.3e}")
    return rho


def apply_unitary(rho: np.ndarray, u: np.ndarray) -> np.ndarray:
    """U rho U^H, rejecting non-unitary U and dimension mismatches."""
    rho = np.asarray(rho, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if u.shape != rho.shape:
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs u {u.shape}")
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if dev > UNITARY_ATOL:
        raise ValueError(f"matrix is not unitary: max |U^H U - I| = {dev:.3e}")
    return u @ rho @ u.conj().T


@dataclass(frozen=True)
class KrausChannel:
    """A completely positive trace-preserving map given by Kraus operators."""

    operators: tuple[np.ndarray, ...]
    noise_rate: float = 0.0

    def __post_init__(self):
        if not self.operators:
            raise ValueError("channel needs at least one Kraus operator")
        dim = self.operators[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for k in self.operators:
            if k.shape != (dim, dim):
                raise ValueError("Kraus operators must share one square dimension")
            total += k.conj().T @ k
        dev = float(np.max(np.abs(total - np.eye(dim))))
        if dev > COMPLETENESS_ATOL:
            raise ValueError(f"Kraus completeness violated: max |sum K^H K - I| = {dev:.3e}")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError(f"noise rate must lie in [0, 1], got {self.noise_rate}")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]


def apply_channel(rho: np.ndarray, channel: KrausChannel) -> np.ndarray:
    """sum_k K rho K^H."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (channel.dim, channel.dim):
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs channel dim {channel.dim}")
    out = np.zeros_like(rho)
    for k in channel.operators:
        out += k @ rho @ k.conj().T
    return out


def depolarizing(p: float, target_qubit: int, n_qubits: int) -> KrausChannel:
    """Single-qubit depolarizing channel rho -> (1-p) rho + p (tr_t rho) (x) I/2.

    Kraus set sqrt(1 - 3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z on the
    target qubit, identity elsewhere.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing rate must lie in [0, 1], got {p}")
    ops = [math.sqrt(1 - 3 * p / 4) * op_on_qubit(PAULI_I, target_qubit, n_qubits)]
    for pauli in (PAULI_X, PAULI_Y, PAULI_Z):
        ops.append(math.sqrt(p / 4) * op_on_qubit(pauli, target_qubit, n_qubits))
    return KrausChannel(operators=tuple(ops), noise_rate=p)


def depolarizing_barrier(p: float, n_qubits: int) -> KrausChannel:
    """Full-register depolarizing channel rho -> (1-p) rho + p I/2^n.

    Pauli-twirl Kraus form: sqrt(1 - p (4^n - 1)/4^n) I plus sqrt(p/4^n) P for
    every non-identity n-qubit Pauli string P.  Every traceless observable
    shrinks by exactly (1-p), so a barrier commutes with any unitary block
    around it; at n = 1 this is the same channel as ``depolarizing``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing rate must lie in [0, 1], got {p}")
    total = 4**n_qubits
    ops = []
    for letters in itertools.product((PAULI_I, PAULI_X, PAULI_Y, PAULI_Z), repeat=n_qubits):
        string = letters[0]
        for m in letters[1:]:
            string = kron(string, m)
        identity_string = all(m is PAULI_I for m in letters)
        weight = 1 - p * (total - 1) / total if identity_string else p / total
        ops.append(math.sqrt(weight) * string)
    return KrausChannel(operators=tuple(ops), noise_rate=p)


def expectation(rho: np.ndarray, obs: np.ndarray) -> float:
    """Tr[obs rho] for a Hermitian observable; the ~0 imaginary part is discarded."""
    obs = require_hermitian(obs, "observable")
    rho = np.asarray(rho, dtype=complex)
    val = complex(np.trace(obs @ rho))
    if abs(val.imag) > 1e-9:
        raise ValueError(f"expectation has non-negligible imaginary part {val.imag:.3e}")
    return val.real


@dataclass(frozen=True)
class Povm:
    """Label-indexed positive operators summing to the identity."""

    elements: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if not self.elements:
            raise ValueError("POVM needs at least one element")
        dim = next(iter(self.elements.values())).shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for label, m in self.elements.items():
            m = require_hermitian(m, f"POVM element {label}")
            w, _ = hermitian_eig(m)
            if float(np.min(w)) < -HERMITIAN_ATOL:
                raise ValueError(f"POVM element {label} is not PSD")
            total += m
        dev = float(np.max(np.abs(total - np.eye(dim))))
        if dev > COMPLETENESS_ATOL:
            raise ValueError(f"POVM elements do not sum to identity: deviation {dev:.3e}")


def measurement_povm(n_qubits: int, qubit: int = 0) -> Povm:
    """Two-outcome computational-basis POVM {+1: |0><0|, -1: |1><1|} on one qubit."""
    p0 = np.array([[1, 0], [0, 0]], dtype=complex)
    p1 = np.array([[0, 0], [0, 1]], dtype=complex)
    return Povm(
        elements={
            +1: op_on_qubit(p0, qubit, n_qubits),
            -1: op_on_qubit(p1, qubit, n_qubits),
        }
    )


def measure_probability(rho: np.ndarray, povm: Povm, label: int) -> float:
    """Tr[M_label rho], clamped into [0, 1] when within 1e-10 of the boundary."""
    if label not in povm.elements:
        raise ValueError(f"unknown outcome label {label!r}")
    val = float(np.trace(povm.elements[label] @ np.asarray(rho, dtype=complex)).real)
    if val < -PROB_CLAMP_ATOL or val > 1 + PROB_CLAMP_ATOL:
        raise ValueError(f"probability {val!r} outside [0, 1] beyond tolerance")
    return min(max(val, 0.0), 1.0)
