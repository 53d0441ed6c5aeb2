"""Matrix exponentials and unitary time evolution (natural units, hbar = 1)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DimensionError,
    LinalgError,
    SpectralDecomposition,
    as_matrix,
    as_state,
    eig_hermitian,
    require_hermitian,
)

#: Scaled-level Frobenius bound for :func:`taylor_expm`.
SCALING_THRESHOLD = 0.5
DEFAULT_TERMS = 20
#: Off-diagonal size below which a Hamiltonian is exponentiated entrywise.
DIAGONAL_TOL = 1e-14


@dataclass(frozen=True)
class UnitaryOperator:
    """A unitary matrix together with the time (and optional label) it evolves for."""

    matrix: np.ndarray
    time: float = 0.0
    generator_label: str | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def unitarity_defect(self) -> float:
        """``||M^H M - I||_F``."""
        m = self.matrix
        return float(np.linalg.norm(m.conj().T @ m - np.eye(self.dim)))

    def __matmul__(self, other):
        if isinstance(other, UnitaryOperator):
            return UnitaryOperator(self.matrix @ other.matrix, self.time + other.time)
        return self.matrix @ other


def is_diagonal(h: np.ndarray, tol: float = DIAGONAL_TOL) -> bool:
    off = h - np.diag(np.diag(h))
    return bool(np.max(np.abs(off), initial=0.0) <= tol)


def expm_from_spectrum(decomp: SpectralDecomposition, t: float) -> np.ndarray:
    """``U exp(-i D t) U^H`` for an already diagonalized Hamiltonian."""
    u = decomp.eigenvectors
    return (u * np.exp(-1j * t * decomp.eigenvalues)) @ u.conj().T


def exact_expm(h, t: float, label: str | None = None) -> UnitaryOperator:
    """Exact propagator ``exp(-i H t)`` of a Hermitian matrix.

    Diagonal input is exponentiated entry by entry; anything else goes through
    :func:`~trotterkit.linalg.eig_hermitian`.
    """
    if not math.isfinite(t):
        raise LinalgError("evolution time must be finite")
    h = require_hermitian(h, "hamiltonian")
    if is_diagonal(h):
        mat = np.diag(np.exp(-1j * t * np.diag(h).real))
    else:
        mat = expm_from_spectrum(eig_hermitian(h), t)
    return UnitaryOperator(mat, float(t), label)


def taylor_expm(a, terms: int = DEFAULT_TERMS) -> np.ndarray:
    """General matrix exponential from the truncated power series.

    ``A`` is scaled by ``2**-m`` until ``||A / 2**m||_F <= 0.5``, the series
    ``sum_{k < terms} (A/2**m)**k / k!`` is summed, and the result is squared
    ``m`` times. Works for non-Hermitian input, so it can check
    :func:`exact_expm` independently.

    Parameters
    ----------
    a : array_like, shape (n, n)
    terms : int
        Number of series terms kept at the scaled level (``>= 1``).

    Raises
    ------
    LinalgError
        If the squaring phase overflows.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    a = as_matrix(a)
    nrm = float(np.linalg.norm(a))
    m = 0 if nrm <= SCALING_THRESHOLD else max(0, math.ceil(math.log2(nrm / SCALING_THRESHOLD)))
    scaled = a / (2.0**m)

    result = np.eye(a.shape[0], dtype=np.complex128)
    term = np.eye(a.shape[0], dtype=np.complex128)
    for k in range(1, terms):
        term = term @ scaled / k
        result = result + term
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(m):
            result = result @ result
    if not np.all(np.isfinite(result)):
        raise LinalgError("overflow in taylor_expm")
    return result


def evolve_state(u: UnitaryOperator, psi) -> np.ndarray:
    """Apply ``U`` to a state vector."""
    psi = as_state(psi)
    if psi.size != u.dim:
        raise DimensionError(f"state of length {psi.size} for a {u.dim}x{u.dim} operator")
    return u.matrix @ psi
