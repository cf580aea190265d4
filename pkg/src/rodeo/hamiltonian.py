"""Zeeman Hamiltonians, dense Hermitian targets, and exact time evolution.

Energies and times are in reduced units (mu_B = hbar = 1). The Zeeman field
term is H = -B sum_i sigma_z^(i) with sigma_z = diag(+1, -1), so the all-zeros
basis state sits at energy -M*B. Spectra always come from the matrix, never
from any prose convention.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITIAN_TOL = 1e-12
DEGENERACY_TOL = 1e-9       # absolute; Zeeman levels are exact multiples of B
JACOBI_OFF_TOL = 1e-12      # off-diagonal Frobenius norm target
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class ZeemanParams:
    spins: int
    field: float

    def __post_init__(self):
        if self.spins < 1:
            raise ValueError("spins must be >= 1")


@dataclass(frozen=True)
class HermitianOperator:
    entries: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = np.ascontiguousarray(self.entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("operator matrix must be square")
        if np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL:
            raise ValueError("matrix is not Hermitian")
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues, orthonormal eigenvector columns, degeneracy partition."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degeneracy_groups: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def num_qubits(self) -> int:
        return int(self.dim).bit_length() - 1


def zeeman(params: ZeemanParams) -> HermitianOperator:
    """H = -B sum_i sigma_z^(i); diagonal entry for bitstring s is -B(#0s - #1s)."""
    m, b = params.spins, params.field
    idx = np.arange(1 << m)
    ones = np.array([bin(i).count("1") for i in idx])
    diag = -b * ((m - ones) - ones)
    return HermitianOperator(np.diag(diag.astype(np.complex128)),
                             label=f"zeeman(spins={m}, field={b})")


def _degeneracy_groups(evals: np.ndarray) -> tuple[tuple[int, ...], ...]:
    groups: list[list[int]] = []
    for i, e in enumerate(evals):
        if groups and e - evals[groups[-1][0]] < DEGENERACY_TOL:
            groups[-1].append(i)
        else:
            groups.append([i])
    return tuple(tuple(g) for g in groups)


def _jacobi_hermitian(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix.

    Sweeps all (p, q) pairs, each rotation zeroing A[p,q] exactly, until the
    off-diagonal Frobenius norm drops below JACOBI_OFF_TOL.
    """
    n = a.shape[0]
    A = a.astype(np.complex128).copy()
    V = np.eye(n, dtype=np.complex128)
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off < JACOBI_OFF_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) == 0.0:
                    continue
                # rotation zeroing the (p, q) element: tan(2 theta) = 2|apq| / (app - aqq)
                theta = 0.5 * np.arctan2(2.0 * abs(apq), A[p, p].real - A[q, q].real)
                c, s = np.cos(theta), np.sin(theta)
                ph = apq / abs(apq)
                colp, colq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * colp + s * np.conj(ph) * colq
                A[:, q] = -s * ph * colp + c * colq
                rowp, rowq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rowp + s * ph * rowq
                A[q, :] = -s * np.conj(ph) * rowp + c * rowq
                A[p, q] = np.conj(A[q, p])        # keep the pair exactly Hermitian
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp + s * np.conj(ph) * vq
                V[:, q] = -s * ph * vp + c * vq
    else:
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off > 1e-10:
            raise RuntimeError(f"Jacobi failed to converge (off-diagonal norm {off:.2e})")
    return np.diag(A).real.copy(), V


def spectral_decompose(H: HermitianOperator) -> SpectralDecomposition:
    """Eigenpairs of H, ascending, ties kept in original index order."""
    a = H.entries
    n = H.dim
    if not np.any(a[~np.eye(n, dtype=bool)]):
        evals = np.diag(a).real.copy()          # already diagonal: basis vectors
        vecs = np.eye(n, dtype=np.complex128)
    else:
        evals, vecs = _jacobi_hermitian(a)
    order = np.argsort(evals, kind="stable")
    evals = evals[order]
    vecs = vecs[:, order]
    return SpectralDecomposition(evals, vecs, _degeneracy_groups(evals))


def evolution_unitary(decomp: SpectralDecomposition, t: float) -> np.ndarray:
    """exp(-i H t) = V diag(e^{-i E_x t}) V^dagger."""
    phases = np.exp(-1j * decomp.eigenvalues * t)
    V = decomp.eigenvectors
    return (V * phases) @ V.conj().T
