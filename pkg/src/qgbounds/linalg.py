"""Dense complex linear algebra for small Hermitian problems.

Matrices are plain numpy ``complex128`` arrays (row-major, one (re, im) pair
per entry).  The eigensolver is a cyclic Jacobi iteration; it accepts a stack
of matrices with leading batch dimensions and diagonalizes the whole stack in
one vectorized pass, which keeps per-matrix Python overhead out of hot loops.
All functions are pure and never mutate their arguments.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericError

# Hermiticity is max |A - A^H| entrywise; PSD allows eigenvalues down to -1e-10.
HERMITIAN_ATOL = 1e-10
PSD_EIG_ATOL = 1e-10

__all__ = [
    "HERMITIAN_ATOL",
    "PSD_EIG_ATOL",
    "kron",
    "is_hermitian",
    "require_hermitian",
    "hermitian_eig",
    "pseudo_inverse",
    "psd_log_sqrt_det",
]


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the standard block layout."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def is_hermitian(a: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    a = np.asarray(a)
    if a.shape[-1] != a.shape[-2]:
        return False
    return bool(np.max(np.abs(a - np.conj(np.swapaxes(a, -1, -2)))) <= atol)


def require_hermitian(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"{what} must be square, got shape {a.shape}")
    dev = float(np.max(np.abs(a - np.conj(np.swapaxes(a, -1, -2))))) if a.size else 0.0
    if dev > HERMITIAN_ATOL:
        raise ValueError(f"{what} is not Hermitian: max |A - A^H| = {dev:.3e}")
    return a


def hermitian_eig(a: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of Hermitian matrices by cyclic Jacobi rotations.

    Accepts shape ``(..., n, n)``; rotations are applied to every matrix of
    the stack simultaneously.  Returns ``(w, v)`` with eigenvalues ``w``
    ascending along the last axis and eigenvector columns ``v[..., :, k]``
    such that ``a ~= v @ diag(w) @ v^H``.
    """
    a = require_hermitian(a, "eigendecomposition input")
    n = a.shape[-1]
    work = a.copy()
    v = np.zeros_like(work)
    v[..., np.arange(n), np.arange(n)] = 1.0

    if n == 1:
        return work[..., 0, 0].real[..., None], v

    # Per-matrix scale so convergence is relative to each matrix's magnitude.
    scale = np.maximum(np.max(np.abs(work), axis=(-2, -1)), 1e-300)
    stop_tol = 1e-13 * scale
    rot_tol = 1e-14 * scale

    iu, ju = np.triu_indices(n, k=1)
    for _ in range(max_sweeps):
        off = np.max(np.abs(work[..., iu, ju]), axis=-1)
        if np.all(off <= stop_tol):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[..., p, q]
                mag = np.abs(apq)
                active = mag > rot_tol
                if not np.any(active):
                    continue
                app = work[..., p, p].real
                aqq = work[..., q, q].real
                theta = 0.5 * np.arctan2(2.0 * mag, app - aqq)
                c = np.where(active, np.cos(theta), 1.0)
                s = np.where(active, np.sin(theta), 0.0)
                phase = np.exp(1j * np.angle(np.where(active, apq, 1.0)))
                se = s * phase
                se_c = s * np.conj(phase)

                colp = work[..., :, p].copy()
                colq = work[..., :, q].copy()
                work[..., :, p] = c[..., None] * colp + se_c[..., None] * colq
                work[..., :, q] = -se[..., None] * colp + c[..., None] * colq
                rowp = work[..., p, :].copy()
                rowq = work[..., q, :].copy()
                work[..., p, :] = c[..., None] * rowp + se[..., None] * rowq
                work[..., q, :] = -se_c[..., None] * rowp + c[..., None] * rowq
                vp = v[..., :, p].copy()
                vq = v[..., :, q].copy()
                v[..., :, p] = c[..., None] * vp + se_c[..., None] * vq
                v[..., :, q] = -se[..., None] * vp + c[..., None] * vq
    else:
        raise NumericError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")

    w = np.einsum("...ii->...i", work).real
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return w, v


def pseudo_inverse(a: np.ndarray, cutoff: float) -> np.ndarray:
    """Moore-Penrose inverse of a PSD Hermitian matrix.

    Eigenvalues >= ``cutoff`` are inverted, smaller ones are zeroed.
    Eigenvalues below -1e-10 are rejected.
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be nonnegative, got {cutoff}")
    w, v = hermitian_eig(a)
    if float(np.min(w)) < -PSD_EIG_ATOL:
        raise ValueError(f"matrix is not PSD: min eigenvalue {float(np.min(w)):.3e}")
    inv = np.where(w >= cutoff, 1.0 / np.where(w >= cutoff, w, 1.0), 0.0)
    return (v * inv[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def psd_log_sqrt_det(a: np.ndarray, floor: float) -> float:
    """0.5 * sum_i ln(max(lambda_i, floor)) for a PSD Hermitian matrix.

    The floor absorbs zero (or slightly negative) modes of singular spectra,
    so there is no failure path.
    """
    if floor <= 0:
        raise ValueError(f"floor must be positive, got {floor}")
    w, _ = hermitian_eig(a)
    return float(0.5 * np.sum(np.log(np.maximum(w, floor))))
