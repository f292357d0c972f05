"""Biorthogonal eigensystems of diagonalizable non-Hermitian matrices.

A diagonalizable complex matrix ``h`` has right eigenvectors ``a_j`` with
``h a_j = E_j a_j`` and left eigenvectors ``b_j`` with ``b_j^H h = E_j b_j^H``.
The two families can be normalized to be biorthonormal, ``<b_i|a_j> = delta_ij``,
and complete, ``sum_j |a_j><b_j| = 1``.  For Hermitian ``h`` both families
coincide with the usual orthonormal eigenbasis.

Left vectors are obtained by inverting the right eigenvector matrix, which
enforces biorthonormality exactly as constructed; they are then cross-checked
against the adjoint matrix independently.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotDiagonalizable

DEFAULT_TOL = 1e-8

# |<a_i|a_j>| above this marks two eigenvector columns as numerically parallel
_PARALLEL_OVERLAP = 1.0 - 1e-6


def as_square_matrix(h) -> np.ndarray:
    """Validate and return ``h`` as a square, finite, complex ndarray."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("matrix entries must be finite")
    return h


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass
class BiorthogonalSystem:
    """Paired eigenvalues and right/left eigenvector columns with B^H A = I.

    ``right[:, j]`` is the right eigenvector ``a_j`` and ``left[:, j]`` the left
    eigenvector ``b_j``; ``cond`` is the condition number of the right
    eigenvector matrix.  Eigenvalues are sorted by (real, imaginary) part and
    the columns follow that order.  Rectangular ``right``/``left`` (fewer
    columns than rows) are tolerated so residuals of truncated systems can be
    measured.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    cond: float

    def __post_init__(self):
        self.eigenvalues = _readonly(np.asarray(self.eigenvalues, dtype=complex))
        self.right = _readonly(np.asarray(self.right, dtype=complex))
        self.left = _readonly(np.asarray(self.left, dtype=complex))
        if self.right.shape != self.left.shape:
            raise ValueError("right and left eigenvector matrices must match in shape")
        if self.right.shape[1] != self.eigenvalues.shape[0]:
            raise ValueError("one eigenvalue per eigenvector column required")

    @property
    def n(self) -> int:
        return self.right.shape[0]


def _fix_gauge(vecs: np.ndarray) -> np.ndarray:
    """Unit-norm columns with the first nonzero component made real-positive."""
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    out = vecs.copy()
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        nonzero = np.flatnonzero(np.abs(col) > 1e-9)
        k = nonzero[0] if nonzero.size else int(np.argmax(np.abs(col)))
        out[:, j] = col * np.exp(-1j * np.angle(col[k]))
    return out


def biorthogonal_decompose(h, tol: float = DEFAULT_TOL) -> BiorthogonalSystem:
    """Compute the biorthogonal eigensystem of a diagonalizable matrix.

    Right eigenvectors are gauge-fixed (unit norm, first nonzero component
    real-positive); the left family is ``B^H = A^{-1}`` so that
    ``<b_i|a_j> = delta_ij`` holds exactly as constructed, and is then
    residual-checked against ``h^H`` independently.

    Parameters
    ----------
    h : array_like, shape (n, n)
        Complex matrix, assumed diagonalizable.
    tol : float
        Relative singular-value floor of the eigenvector matrix below which
        the matrix is reported as defective.

    Raises
    ------
    NotDiagonalizable
        If the right eigenvector matrix is numerically rank deficient, or an
        eigenvalue cluster tighter than ``tol * ||h||`` comes with (nearly)
        parallel eigenvectors.  Both signal an exceptional point or a
        numerical degeneracy.
    """
    h = as_square_matrix(h)
    if tol <= 0:
        raise ValueError("tol must be positive")
    evals, right = np.linalg.eig(h)
    order = np.lexsort((evals.imag, evals.real))
    evals = evals[order]
    right = _fix_gauge(right[:, order])

    svals = np.linalg.svd(right, compute_uv=False)
    if svals[-1] < tol * svals[0]:
        raise NotDiagonalizable(
            f"right eigenvector matrix is rank deficient "
            f"(singular value ratio {svals[-1] / svals[0]:.3e} < tol {tol:.1e})"
        )
    scale = np.linalg.norm(h, 2)
    for i in range(len(evals)):
        for j in range(i + 1, len(evals)):
            if abs(evals[i] - evals[j]) <= tol * max(scale, 1e-300):
                if abs(np.vdot(right[:, i], right[:, j])) >= _PARALLEL_OVERLAP:
                    raise NotDiagonalizable(
                        f"eigenvalues {evals[i]:.6g} and {evals[j]:.6g} coincide "
                        f"within tol*||h|| with a deficient eigenspace"
                    )
    cond = float(svals[0] / svals[-1])
    left = np.linalg.inv(right).conj().T

    # independent cross-check: b_j must be right eigenvectors of h^H
    adjoint_residual = np.linalg.norm(
        h.conj().T @ left - left * evals.conj()[None, :], 2
    ) / max(scale, 1e-300)
    if adjoint_residual > max(tol, 1e-8):
        raise NotDiagonalizable(
            f"left eigenvectors fail the adjoint eigenrelation "
            f"(relative residual {adjoint_residual:.3e}); numerical degeneracy"
        )
    return BiorthogonalSystem(eigenvalues=evals, right=right, left=left, cond=cond)


def biorthonormality_residual(system: BiorthogonalSystem) -> float:
    """Max-entry magnitude of ``B^H A - I``."""
    gram = system.left.conj().T @ system.right
    return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))


def completeness_residual(system: BiorthogonalSystem) -> float:
    """Max-entry magnitude of ``sum_j a_j b_j^H - I``."""
    proj = system.right @ system.left.conj().T
    return float(np.max(np.abs(proj - np.eye(system.n))))


def spectrum_is_real(system: BiorthogonalSystem, tol: float = 1e-10) -> bool:
    """True iff every eigenvalue is real to within ``tol`` relative to the spectrum scale."""
    scale = float(np.max(np.abs(system.eigenvalues))) if system.eigenvalues.size else 0.0
    worst = float(np.max(np.abs(system.eigenvalues.imag))) if system.eigenvalues.size else 0.0
    if scale == 0.0:
        return worst <= tol
    return worst <= tol * scale
