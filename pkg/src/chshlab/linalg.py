"""Dense complex linear algebra for small operators.

Everything in the CHSH scenario lives in dimension 2 or 4 (16 at most),
so the eigensolver is a cyclic Jacobi iteration: guaranteed convergence,
no external solver, and accuracy near machine precision at these sizes.
numpy arrays are the universal carrier; matrices are row-major complex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitianError

HERMITICITY_TOL = 1e-10
JACOBI_OFF_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(m) -> np.ndarray:
    """Coerce input to a 2-D complex ndarray."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T


def hermitize(m) -> np.ndarray:
    """Symmetrize (M + M†)/2, absorbing roundoff asymmetry."""
    a = as_matrix(m)
    return (a + dagger(a)) / 2


def hermiticity_defect(m) -> float:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return float("inf")
    return float(np.max(np.abs(a - dagger(a))))


def require_hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    a = as_matrix(m)
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitianError(
            f"matrix deviates from Hermitian by {defect:.3e} (tol {tol:.1e})"
        )
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product; dims multiply."""
    return np.kron(as_matrix(a), as_matrix(b))


def comm(a, b) -> np.ndarray:
    """Commutator [a, b] = ab - ba."""
    a = as_matrix(a)
    b = as_matrix(b)
    return a @ b - b @ a


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted ascending with matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    def projector(self, index: int) -> np.ndarray:
        v = self.eigenvectors[:, index].reshape(-1, 1)
        return v @ v.conj().T


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    apq = a[p, q]
    g = abs(apq)
    if g == 0.0:
        return
    phase = apq / g
    tau = (a[q, q].real - a[p, p].real) / (2.0 * g)
    t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # 2x2 unitary diagonalizing the (p,q) Hermitian block
    r = np.array([[c * phase, s * phase], [-s, c]], dtype=complex)
    a[:, [p, q]] = a[:, [p, q]] @ r
    a[[p, q], :] = r.conj().T @ a[[p, q], :]
    v[:, [p, q]] = v[:, [p, q]] @ r
    # the block is diagonalized exactly; stamp out roundoff residue
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real


def _off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def eig_hermitian(m, tol: float = HERMITICITY_TOL) -> Spectrum:
    """Full spectrum of a Hermitian matrix via cyclic Jacobi sweeps.

    Raises NotHermitianError if the asymmetry exceeds `tol`.
    """
    a = require_hermitian(m, tol)
    n = a.shape[0]
    a = hermitize(a).astype(complex)
    v = np.eye(n, dtype=complex)
    for _ in range(JACOBI_MAX_SWEEPS):
        if _off_diagonal_norm(a) <= JACOBI_OFF_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate(a, v, p, q)
    vals = np.diag(a).real.copy()
    order = np.argsort(vals, kind="stable")
    return Spectrum(eigenvalues=vals[order], eigenvectors=v[:, order])


def operator_norm(m) -> float:
    """Largest singular value; equals max |eigenvalue| for Hermitian input."""
    a = as_matrix(m)
    gram = dagger(a) @ a
    top = eig_hermitian(hermitize(gram)).eigenvalues[-1]
    return float(np.sqrt(max(top, 0.0)))


def min_eigenvalue(m) -> float:
    """Smallest eigenvalue of a Hermitian matrix (used for PSD checks)."""
    return float(eig_hermitian(m).eigenvalues[0])


def is_psd(m, tol: float = 1e-12) -> bool:
    """PSD within tolerance, after symmetrizing away roundoff."""
    return min_eigenvalue(hermitize(m)) >= -tol
