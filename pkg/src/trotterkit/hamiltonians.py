"""Constructors for the Hamiltonians used in tests, sweeps and the CLI."""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .linalg import LinalgError
from .trotter import SplitHamiltonian

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

_GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed: int, count: int) -> np.ndarray:
    """First ``count`` outputs of SplitMix64 started from ``seed``.

    Output ``k`` (1-based) is ``mix(seed + k * 0x9E3779B97F4A7C15 mod 2**64)``
    with the standard Stafford variant-13 finalizer, so streams can be
    reproduced bit for bit outside numpy.
    """
    base = np.uint64(int(seed) % (1 << 64))
    k = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = base + k * _GOLDEN_GAMMA
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniform(seed: int, count: int, low: float = -1.0, high: float = 1.0) -> np.ndarray:
    """Uniform doubles in ``[low, high)`` built from the top 53 bits of each draw."""
    unit = (splitmix64(seed, count) >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return low + (high - low) * unit


def build_diagonal(energies) -> np.ndarray:
    e = np.asarray(energies, dtype=np.float64).ravel()
    if e.size == 0:
        raise LinalgError("energies must be non-empty")
    if not np.all(np.isfinite(e)):
        raise LinalgError("energies must be finite")
    return np.diag(e).astype(np.complex128)


def random_energies(dim: int, seed: int) -> np.ndarray:
    """``dim`` seeded energies in ``[-1, 1)``."""
    return uniform(seed, dim)


def build_random_hermitian(dim: int, seed: int) -> np.ndarray:
    """Seeded random Hermitian matrix ``(G + G^H) / 2``.

    ``G`` takes ``2 * dim**2`` draws from :func:`uniform`: the first ``dim**2``
    fill the real parts row-major, the rest the imaginary parts.
    """
    if dim < 1:
        raise LinalgError("dim must be >= 1")
    draws = uniform(seed, 2 * dim * dim)
    g = draws[: dim * dim].reshape(dim, dim) + 1j * draws[dim * dim :].reshape(dim, dim)
    return 0.5 * (g + g.conj().T)


@dataclass(frozen=True)
class PauliString:
    """``coefficient`` times a tensor product of single-qubit Paulis.

    ``letters[0]`` is the leftmost (most significant) tensor factor.
    """

    letters: str
    coefficient: float = 1.0

    def __post_init__(self):
        if not self.letters or any(ch not in PAULI for ch in self.letters):
            raise LinalgError(f"invalid Pauli letters {self.letters!r}")

    @property
    def qubit_count(self) -> int:
        return len(self.letters)

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Parse ``"0.5*XZY"``; a bare ``"XZ"`` means coefficient 1."""
        m = re.fullmatch(r"\s*(?:([^*]+)\*)?\s*([IXYZ]+)\s*", text)
        if m is None:
            raise LinalgError(f"cannot parse Pauli string {text!r}")
        coef = 1.0 if m.group(1) is None else float(m.group(1))
        return cls(m.group(2), coef)

    def __str__(self) -> str:
        return f"{self.coefficient!r}*{self.letters}"


def build_pauli(p: PauliString) -> np.ndarray:
    return p.coefficient * reduce(np.kron, (PAULI[ch] for ch in p.letters))


def build_tight_binding(sites: int, hopping: float, onsite) -> SplitHamiltonian:
    """Open-boundary chain split into hopping (``S``) and on-site (``T``) parts."""
    if sites < 2:
        raise LinalgError("tight-binding chain needs at least 2 sites")
    onsite = np.asarray(onsite, dtype=np.float64).ravel()
    if onsite.size != sites:
        raise LinalgError(f"onsite has {onsite.size} entries for {sites} sites")
    hop = np.zeros((sites, sites), dtype=np.complex128)
    idx = np.arange(sites - 1)
    hop[idx, idx + 1] = hopping
    hop[idx + 1, idx] = hopping
    return SplitHamiltonian(hop, build_diagonal(onsite))
