"""The uniform antisymmetric matrix G and its closed-form eigendecomposition.

G has ``g`` on the diagonal, +1 above it and -1 below it. Its eigenvectors
are the columns of ``V = D @ F`` where ``F`` is the unitary DFT matrix
(``F[j, k] = exp(2j*pi*j*k/N) / sqrt(N)``) and ``D = diag(exp(1j*pi*j/N))``.
Column ``k`` of V belongs to the eigenvalue ``g + 1j*cot((2k+1)*pi/(2N))``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SizeError

MAX_QUBITS = 7


def _check_qubits(n_qubits, high=MAX_QUBITS):
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= high:
        raise SizeError(f"n_qubits must be an integer in [1, {high}], got {n_qubits!r}")
    return int(n_qubits)


def build_g(n_qubits, diag_shift=0.0):
    n = 2 ** _check_qubits(n_qubits)
    g = np.triu(np.ones((n, n)), 1) - np.tril(np.ones((n, n)), -1)
    g = g + float(diag_shift) * np.eye(n)
    return g.astype(np.complex128)


def g_eigenvalues(n_dim, diag_shift=0.0):
    """Eigenvalues of the n_dim x n_dim G, in column order k = 0..n_dim-1."""
    k = np.arange(n_dim)
    return float(diag_shift) + 1j / np.tan((2 * k + 1) * np.pi / (2 * n_dim))


def dft_matrix(n_dim):
    """Unitary DFT matrix with omega = exp(+2*pi*i/N)."""
    jk = np.outer(np.arange(n_dim), np.arange(n_dim))
    return np.exp(2j * np.pi * jk / n_dim) / np.sqrt(n_dim)


def phase_matrix(n_dim):
    return np.diag(np.exp(1j * np.pi * np.arange(n_dim) / n_dim))


@dataclass(frozen=True)
class GSpectrum:
    n_qubits: int
    diag_shift: float
    eigenvalues: np.ndarray
    phase_matrix: np.ndarray
    fourier_matrix: np.ndarray
    eigenvector_matrix: np.ndarray

    @property
    def dim(self):
        return self.eigenvalues.shape[0]


def g_spectrum(n_qubits, diag_shift=0.0):
    n = 2 ** _check_qubits(n_qubits)
    d = phase_matrix(n)
    f = dft_matrix(n)
    return GSpectrum(
        n_qubits=int(n_qubits),
        diag_shift=float(diag_shift),
        eigenvalues=g_eigenvalues(n, diag_shift),
        phase_matrix=d,
        fourier_matrix=f,
        eigenvector_matrix=d @ f,
    )


def verify_spectrum(spec):
    """Largest infinity-norm eigen-residual ``|G v_k - lambda_k v_k|`` over all k."""
    g = build_g(spec.n_qubits, spec.diag_shift)
    v = spec.eigenvector_matrix
    resid = g @ v - v * spec.eigenvalues[None, :]
    return float(np.max(np.abs(resid)))


def reconstruct_exp(spec):
    """``V diag(exp(lambda)) V^dagger``, the closed-form e^G."""
    v = spec.eigenvector_matrix
    return (v * np.exp(spec.eigenvalues)[None, :]) @ v.conj().T
