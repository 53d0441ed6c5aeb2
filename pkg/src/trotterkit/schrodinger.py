"""Split-step Fourier evolution for ``H = p^2/2m + V(x)`` on a periodic 1D grid.

The kinetic factor is diagonal in momentum space and the potential factor is
diagonal in position space, so each is applied exactly; only their product is
approximate. Each step applies the potential phase first and the kinetic
propagator second, i.e. the operator ``exp(-i dt K) exp(-i dt V)`` acting on a
column vector, matching :func:`trotterkit.trotter.trotter_step` with
``S = K`` and ``T = V``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .fft import fft, ifft, is_power_of_two
from .linalg import DimensionError, LinalgError
from .trotter import SplitHamiltonian

PRESETS = ("linear", "free")


@dataclass(frozen=True)
class GridSpec:
    points: int
    x_min: float
    x_max: float
    mass: float = 1.0

    def __post_init__(self):
        if not is_power_of_two(self.points):
            raise LinalgError(f"grid points must be a power of two, got {self.points}")
        if not self.x_max > self.x_min:
            raise LinalgError("x_max must exceed x_min")
        if not self.mass > 0:
            raise LinalgError("mass must be positive")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def spacing(self) -> float:
        return self.length / self.points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(self.points)

    @property
    def k(self) -> np.ndarray:
        """Periodic wavenumbers in FFT order: ``0, 1, ..., N/2-1, -N/2, ..., -1`` times ``2 pi / L``."""
        n = self.points
        f = np.concatenate((np.arange(n // 2), np.arange(-(n // 2), 0)))
        return 2.0 * np.pi * f / self.length

    @property
    def kinetic_energies(self) -> np.ndarray:
        return self.k**2 / (2.0 * self.mass)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Grid amplitudes normalized so that ``sum |psi_j|^2 * dx == 1``."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.points,):
            raise DimensionError(f"expected {self.grid.points} amplitudes, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def normalized(cls, grid: GridSpec, values) -> "WaveFunction":
        v = np.asarray(values, dtype=np.complex128)
        nrm = np.sqrt(np.sum(np.abs(v) ** 2) * grid.spacing)
        if nrm == 0:
            raise LinalgError("cannot normalize a zero wavefunction")
        return cls(grid, v / nrm)

    @classmethod
    def gaussian(cls, grid: GridSpec, x0: float = 0.0, sigma: float = 1.0, p0: float = 0.0):
        """``exp(-(x - x0)^2 / (4 sigma^2) + i p0 x)``, normalized; ``sigma`` is the position spread."""
        x = grid.x
        return cls.normalized(grid, np.exp(-((x - x0) ** 2) / (4.0 * sigma**2) + 1j * p0 * x))

    def norm(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.spacing)

    def as_unit_vector(self) -> np.ndarray:
        """Amplitudes scaled by ``sqrt(dx)``: unit Euclidean norm for a normalized state."""
        return self.values * np.sqrt(self.grid.spacing)


def potential_preset(name: str, grid: GridSpec) -> np.ndarray:
    if name == "linear":
        return grid.x.copy()
    if name == "free":
        return np.zeros(grid.points)
    raise LinalgError(f"unknown potential preset {name!r}; choose from {PRESETS}")


def _check_potential(psi: WaveFunction, v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (psi.grid.points,):
        raise DimensionError(f"potential has shape {v.shape}, grid has {psi.grid.points} points")
    return v


def kinetic_step(psi: WaveFunction, dt: float) -> WaveFunction:
    phase = np.exp(-1j * dt * psi.grid.kinetic_energies)
    return WaveFunction(psi.grid, ifft(phase * fft(psi.values)))


def potential_step(psi: WaveFunction, v, dt: float) -> WaveFunction:
    v = _check_potential(psi, v)
    return WaveFunction(psi.grid, np.exp(-1j * dt * v) * psi.values)


def split_step_trajectory(
    psi: WaveFunction, v, t: float, n_steps: int
) -> Iterator[tuple[int, WaveFunction]]:
    """Yield ``(step, psi)`` for ``step = 0, ..., n_steps`` with ``dt = t / n_steps``."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    v = _check_potential(psi, v)
    dt = t / n_steps
    kin = np.exp(-1j * dt * psi.grid.kinetic_energies)
    pot = np.exp(-1j * dt * v)
    values = psi.values
    yield 0, psi
    for step in range(1, n_steps + 1):
        values = ifft(kin * fft(pot * values))
        yield step, WaveFunction(psi.grid, values)


def split_step_evolve(psi: WaveFunction, v, t: float, n_steps: int) -> WaveFunction:
    """``n_steps`` repetitions of potential-then-kinetic with ``dt = t / n_steps``."""
    for _, out in split_step_trajectory(psi, v, t, n_steps):
        pass
    return out


class Observables(NamedTuple):
    norm: float
    mean_x: float
    mean_p: float
    energy_kinetic: float


def observables(psi: WaveFunction) -> Observables:
    """Norm, ``<x>``, ``<p>`` and ``<p^2/2m>``.

    Momentum-space sums use Parseval, ``sum_j |psi_j|^2 = sum_k |psi_k|^2 / N``,
    so all four are plain expectation values (not divided by the norm).
    """
    g = psi.grid
    dens = np.abs(psi.values) ** 2
    power = np.abs(fft(psi.values)) ** 2 * (g.spacing / g.points)
    return Observables(
        norm=float(np.sum(dens) * g.spacing),
        mean_x=float(np.sum(g.x * dens) * g.spacing),
        mean_p=float(np.sum(g.k * power)),
        energy_kinetic=float(np.sum(g.kinetic_energies * power)),
    )


def kinetic_matrix(grid: GridSpec) -> np.ndarray:
    """Dense spectral ``p^2/2m`` on the grid: ``F^-1 diag(k^2/2m) F``."""
    n = grid.points
    cols = [ifft(grid.kinetic_energies * fft(e)) for e in np.eye(n)]
    k = np.stack(cols, axis=1)
    return 0.5 * (k + k.conj().T)


def grid_hamiltonian(grid: GridSpec, v) -> SplitHamiltonian:
    """Dense ``(S, T) = (kinetic, diag(V))`` split of the grid Hamiltonian."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (grid.points,):
        raise DimensionError("potential length does not match the grid")
    return SplitHamiltonian(kinetic_matrix(grid), np.diag(v).astype(np.complex128))
