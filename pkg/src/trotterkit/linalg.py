"""Dense complex matrix helpers and a Hermitian eigensolver.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The functions here
validate their inputs and never modify them in place.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

#: Sweep cap for the cyclic Jacobi eigensolver.
MAX_SWEEPS = 100
#: Off-diagonal Frobenius threshold, relative to the input's Frobenius norm.
OFFDIAG_RTOL = 1e-12


class LinalgError(ValueError):
    """Base class for errors raised by trotterkit's numerical routines."""


class DimensionError(LinalgError):
    pass


class NotHermitianError(LinalgError):
    pass


class ConvergenceError(LinalgError):
    """Raised when the eigensolver exhausts its sweep budget.

    The off-diagonal Frobenius norm left at exit is kept on ``residual``.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class SpectralDecomposition(NamedTuple):
    """Eigenvalues (ascending) and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


class Norms(NamedTuple):
    frobenius: float
    operator_2norm: float


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a square, finite ``complex128`` array or raise."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise LinalgError(f"{name} has non-finite entries")
    return m


def as_state(v, dim: int | None = None, name: str = "state") -> np.ndarray:
    x = np.asarray(v, dtype=np.complex128)
    if x.ndim != 1 or x.size == 0:
        raise DimensionError(f"{name} must be a non-empty vector, got shape {x.shape}")
    if dim is not None and x.size != dim:
        raise DimensionError(f"{name} has length {x.size}, expected {dim}")
    if not np.all(np.isfinite(x)):
        raise LinalgError(f"{name} has non-finite entries")
    return x


def normalize(v) -> np.ndarray:
    """Scale a vector to unit Euclidean norm."""
    x = as_state(v)
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        raise LinalgError("cannot normalize the zero vector")
    return x / nrm


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a, "a"), as_matrix(b, "b")
    _check_same_dim(a, b)
    return a @ b


def commutator(a, b) -> np.ndarray:
    """Return ``AB - BA``."""
    a, b = as_matrix(a, "a"), as_matrix(b, "b")
    _check_same_dim(a, b)
    return a @ b - b @ a


def hermitian_check(a, tol: float = 1e-12) -> bool:
    """True iff ``||A - A^H||_F <= tol``."""
    m = as_matrix(a)
    return bool(np.linalg.norm(m - m.conj().T) <= tol)


def hermitian_tolerance(a: np.ndarray) -> float:
    """Default Hermiticity tolerance used by every routine that requires it."""
    return 1e-10 * max(1.0, float(np.linalg.norm(a)))


def require_hermitian(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if not hermitian_check(m, hermitian_tolerance(m)):
        raise NotHermitianError(f"{name} is not Hermitian")
    return m


def _offdiag_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings of ``range(n)`` into disjoint ``(p, q)`` pairs, ``p < q``.

    Every pair appears exactly once across the returned rounds (circle method).
    An odd ``n`` gets a dummy slot whose pairings are dropped.
    """
    m = n + (n % 2)
    slots = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            a, b = slots[k], slots[m - 1 - k]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        slots = [slots[0], slots[-1]] + slots[1:-1]
    return rounds


def eig_hermitian(a) -> SpectralDecomposition:
    """Diagonalize a Hermitian matrix with cyclic complex Jacobi rotations.

    Each rotation annihilates one off-diagonal pair ``(p, q)``: a phase on
    column ``q`` makes ``A[p, q]`` real, then a real Givens rotation zeroes it.
    A sweep visits every pair once, in round-robin order so that the ``n/2``
    disjoint rotations of a round are applied together. Sweeps continue until
    the off-diagonal Frobenius norm drops to ``OFFDIAG_RTOL * ||A||_F``.

    Parameters
    ----------
    a : array_like, shape (n, n)
        Hermitian input. Hermiticity is checked at ``1e-10 * ||A||_F``.

    Returns
    -------
    SpectralDecomposition
        Real eigenvalues in ascending order (stable sort) and the matching
        orthonormal eigenvectors as columns.

    Raises
    ------
    NotHermitianError
        If the input is not Hermitian within tolerance.
    ConvergenceError
        If ``MAX_SWEEPS`` sweeps do not reach the threshold.
    """
    m = require_hermitian(a)
    n = m.shape[0]
    work = 0.5 * (m + m.conj().T)
    vecs = np.eye(n, dtype=np.complex128)
    threshold = OFFDIAG_RTOL * float(np.linalg.norm(work))
    # rotations below this size cannot move the off-diagonal norm past threshold
    skip = threshold / n
    rounds = _round_robin(n)

    off = _offdiag_norm(work)
    sweeps = 0
    while off > threshold:
        if sweeps == MAX_SWEEPS:
            raise ConvergenceError(
                f"Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps "
                f"(off-diagonal norm {off:.3e})",
                residual=off,
            )
        for ps, qs in rounds:
            apq = work[ps, qs]
            mag = np.abs(apq)
            active = mag > skip
            if not active.any():
                continue
            ps, qs, apq, mag = ps[active], qs[active], apq[active], mag[active]
            phase_bar = (apq / mag).conj()
            tau = (work[qs, qs].real - work[ps, ps].real) / (2.0 * mag)
            t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # columns (p, q) are mixed by [[c, s], [-s*conj(phase), c*conj(phase)]]
            sb, cb = s * phase_bar, c * phase_bar
            colp, colq = work[:, ps], work[:, qs]
            work[:, ps] = c * colp - sb * colq
            work[:, qs] = s * colp + cb * colq
            rowp, rowq = work[ps, :], work[qs, :]
            work[ps, :] = c[:, None] * rowp - sb.conj()[:, None] * rowq
            work[qs, :] = s[:, None] * rowp + cb.conj()[:, None] * rowq
            work[ps, qs] = 0.0
            work[qs, ps] = 0.0
            work[ps, ps] = work[ps, ps].real
            work[qs, qs] = work[qs, qs].real
            vp, vq = vecs[:, ps], vecs[:, qs]
            vecs[:, ps] = c * vp - sb * vq
            vecs[:, qs] = s * vp + cb * vq
        sweeps += 1
        off = _offdiag_norm(work)

    vals = np.diag(work).real.copy()
    order = np.argsort(vals, kind="stable")
    return SpectralDecomposition(vals[order], vecs[:, order])


def norms(a) -> Norms:
    """Frobenius norm and operator 2-norm (largest singular value).

    The 2-norm is the square root of the top eigenvalue of ``A^H A``, taken
    from :func:`eig_hermitian`.
    """
    m = as_matrix(a)
    fro = float(np.linalg.norm(m))
    if fro == 0.0:
        return Norms(0.0, 0.0)
    # scale first so the Gram matrix stays well inside double range
    ms = m / fro
    gram = ms.conj().T @ ms
    top = eig_hermitian(0.5 * (gram + gram.conj().T)).eigenvalues[-1]
    return Norms(fro, fro * math.sqrt(max(0.0, float(top))))


def operator_norm(a) -> float:
    return norms(a).operator_2norm
