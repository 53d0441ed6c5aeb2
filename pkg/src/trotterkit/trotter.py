"""Lie-Trotter product formula, its linearized variant, and error probes.

For a split Hamiltonian ``H = S + T`` the first-order product

    (exp(-i t/n S) exp(-i t/n T))**n

converges to ``exp(-i t H)`` as ``n`` grows. The routines here build that
product, measure its distance to the exact propagator, and evaluate the
per-step defect ``(exp(-ihS) exp(-ihT) - exp(-ih(S+T))) / h`` that controls
the convergence.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .expm import UnitaryOperator, exact_expm, expm_from_spectrum, is_diagonal
from .matrix_io import dumps, fmt_float, vector_from_json, vector_to_json
from .linalg import (
    DimensionError,
    LinalgError,
    SpectralDecomposition,
    as_state,
    commutator,
    eig_hermitian,
    operator_norm,
    require_hermitian,
)

#: Errors below this are at the double-precision floor and skipped by the fit.
FIT_FLOOR = 1e-12
DEFAULT_SAMPLES = 41


class ErrorMetric(str, enum.Enum):
    OPERATOR_2NORM = "operator_2norm"
    STATE_VECTOR_NORM = "state_vector_norm"


def _propagator(h: np.ndarray, spectrum: SpectralDecomposition, t: float) -> np.ndarray:
    if is_diagonal(h):
        return np.diag(np.exp(-1j * t * np.diag(h).real))
    return expm_from_spectrum(spectrum, t)


@dataclass(frozen=True, eq=False)
class SplitHamiltonian:
    """Ordered pair ``(S, T)`` of Hermitian matrices with ``H = S + T``.

    Eigendecompositions of ``S``, ``T`` and ``S + T`` are computed on first use
    and cached, so repeated propagators at different times are cheap.
    """

    s: np.ndarray
    t_op: np.ndarray
    _spectra: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        s = require_hermitian(self.s, "S")
        t = require_hermitian(self.t_op, "T")
        if s.shape != t.shape:
            raise DimensionError(f"S is {s.shape} but T is {t.shape}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t_op", t)

    @property
    def dim(self) -> int:
        return self.s.shape[0]

    @property
    def total(self) -> np.ndarray:
        return self.s + self.t_op

    @cached_property
    def commutator_norm(self) -> float:
        """Operator 2-norm of ``[S, T]``."""
        return operator_norm(commutator(self.s, self.t_op))

    def _spectrum(self, key: str, mat: np.ndarray) -> SpectralDecomposition | None:
        if is_diagonal(mat):
            return None
        cache = self._spectra
        if key not in cache:
            cache[key] = eig_hermitian(mat)
        return cache[key]

    def propagate_s(self, t: float) -> np.ndarray:
        return _propagator(self.s, self._spectrum("s", self.s), t)

    def propagate_t(self, t: float) -> np.ndarray:
        return _propagator(self.t_op, self._spectrum("t", self.t_op), t)

    def propagate_exact(self, t: float) -> np.ndarray:
        """``exp(-i t (S + T))``."""
        total = self.total
        return _propagator(total, self._spectrum("total", total), t)


def trotter_step(h: SplitHamiltonian, dt: float) -> UnitaryOperator:
    """One product factor ``exp(-i dt S) exp(-i dt T)``; ``T`` acts first on a vector."""
    return UnitaryOperator(h.propagate_s(dt) @ h.propagate_t(dt), float(dt))


def trotter_evolve(h: SplitHamiltonian, t: float, n: int) -> UnitaryOperator:
    """``trotter_step(h, t/n)`` raised to the ``n``-th power by binary exponentiation."""
    if n < 1:
        raise ValueError("n must be >= 1")
    step = trotter_step(h, t / n).matrix
    return UnitaryOperator(np.linalg.matrix_power(step, n), float(t))


class LinearizedTrotter(NamedTuple):
    matrix: np.ndarray
    unitarity_deviation: float


def linearized_trotter(h: SplitHamiltonian, t: float, log2_n: int) -> LinearizedTrotter:
    """Approximate ``exp(-i t (S+T))`` by ``((I + A/N)(I + B/N))**N``.

    Here ``A = -i t S``, ``B = -i t T`` and ``N = 2**log2_n``; the power is
    formed by ``log2_n`` successive squarings of the single factor. The result
    is only unitary to first order in ``1/N``, so ``||M^H M - I||_F`` is
    returned with it.
    """
    if log2_n < 0:
        raise ValueError("log2_n must be >= 0")
    n_total = 2.0**log2_n
    eye = np.eye(h.dim, dtype=np.complex128)
    a = -1j * t * h.s
    b = -1j * t * h.t_op
    m = (eye + a / n_total) @ (eye + b / n_total)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(log2_n):
            m = m @ m
    if not np.all(np.isfinite(m)):
        raise LinalgError("overflow in linearized_trotter")
    dev = float(np.linalg.norm(m.conj().T @ m - eye))
    return LinearizedTrotter(m, dev)


def _defect_matrix(h: SplitHamiltonian, step: float) -> np.ndarray:
    if step == 0:
        raise ValueError("step must be nonzero")
    return h.propagate_s(step) @ h.propagate_t(step) - h.propagate_exact(step)


def defect(h: SplitHamiltonian, step: float, xi) -> float:
    """``||u_h(xi)||`` with ``u_h = (exp(-ihS) exp(-ihT) - exp(-ih(S+T))) / h``."""
    xi = as_state(xi, h.dim, "xi")
    d = _defect_matrix(h, step)
    return float(np.linalg.norm(d @ xi)) / abs(step)


def defect_supremum(
    h: SplitHamiltonian, step: float, xi, t: float, samples: int = DEFAULT_SAMPLES
) -> float:
    """Largest defect along the exact orbit ``xi_s = exp(-i s (S+T)) xi``.

    ``s`` runs over ``samples`` evenly spaced points of ``[-|t|, |t|]``,
    endpoints included; a single sample sits at ``-|t|``. The grid maximum
    is a lower bound for the supremum over the interval.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    xi = as_state(xi, h.dim, "xi")
    d = _defect_matrix(h, step)
    grid = np.linspace(-abs(t), abs(t), samples)
    orbit = np.stack([h.propagate_exact(s) @ xi for s in grid], axis=1)
    return float(np.max(np.linalg.norm(d @ orbit, axis=0))) / abs(step)


def generator_residual(hmat, step: float, xi) -> float:
    """``|| i (exp(-i H step) xi - xi) / step - H xi ||``; ``O(step)`` as step -> 0."""
    if step == 0:
        raise ValueError("step must be nonzero")
    hmat = require_hermitian(hmat, "hamiltonian")
    xi = as_state(xi, hmat.shape[0], "xi")
    moved = exact_expm(hmat, step).matrix @ xi
    return float(np.linalg.norm(1j * (moved - xi) / step - hmat @ xi))


@dataclass(frozen=True)
class ConvergenceReport:
    """Trotter errors against the exact propagator for a list of step counts."""

    t: float
    step_counts: tuple[int, ...]
    errors: tuple[float, ...]
    fitted_order: float
    metric: ErrorMetric = ErrorMetric.OPERATOR_2NORM
    xi: np.ndarray | None = field(default=None, compare=False)

    @property
    def order_defined(self) -> bool:
        return not math.isnan(self.fitted_order)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "error"])
        for n, err in zip(self.step_counts, self.errors):
            writer.writerow([n, fmt_float(err)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        out = {
            "t": self.t,
            "metric": self.metric.value,
            "step_counts": list(self.step_counts),
            "errors": list(self.errors),
            "fitted_order": self.fitted_order if self.order_defined else None,
            "order_defined": self.order_defined,
        }
        if self.xi is not None:
            out["xi"] = vector_to_json(self.xi)
        return out

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "ConvergenceReport":
        order = obj.get("fitted_order")
        xi = obj.get("xi")
        return cls(
            t=float(obj["t"]),
            step_counts=tuple(int(n) for n in obj["step_counts"]),
            errors=tuple(float(e) for e in obj["errors"]),
            fitted_order=math.nan if order is None else float(order),
            metric=ErrorMetric(obj["metric"]),
            xi=None if xi is None else vector_from_json(xi),
        )

    @classmethod
    def from_json(cls, text: str) -> "ConvergenceReport":
        return cls.from_dict(json.loads(text))


def read_convergence_csv(text: str) -> list[tuple[int, float]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["n", "error"]:
        raise ValueError("convergence CSV must start with the header 'n,error'")
    return [(int(n), float(e)) for n, e in rows[1:]]


def fit_order(step_counts: Sequence[int], errors: Sequence[float]) -> float:
    """Negated least-squares slope of ``log(error)`` against ``log(n)``.

    Points at or below ``FIT_FLOOR`` are dropped; NaN when fewer than two remain.
    """
    n = np.asarray(step_counts, dtype=np.float64)
    e = np.asarray(errors, dtype=np.float64)
    keep = e > FIT_FLOOR
    if np.count_nonzero(keep) < 2:
        return math.nan
    slope = np.polyfit(np.log(n[keep]), np.log(e[keep]), 1)[0]
    return float(-slope)


def convergence_study(
    h: SplitHamiltonian,
    t: float,
    step_counts: Sequence[int],
    metric: ErrorMetric | str = ErrorMetric.OPERATOR_2NORM,
    xi=None,
) -> ConvergenceReport:
    """Distance between ``trotter_evolve(h, t, n)`` and the exact propagator.

    Parameters
    ----------
    h : SplitHamiltonian
    t : float
        Total evolution time.
    step_counts : sequence of int
        Strictly increasing positive step counts; each is evaluated from
        scratch.
    metric : ErrorMetric or str
        ``"operator_2norm"`` compares the propagators, ``"state_vector_norm"``
        compares their action on ``xi``.
    xi : array_like, optional
        Required for the state metric.

    Returns
    -------
    ConvergenceReport
        ``fitted_order`` is NaN (with ``order_defined`` False) when fewer than
        two errors sit above the floating-point floor.
    """
    metric = ErrorMetric(metric)
    counts = [int(n) for n in step_counts]
    if not counts:
        raise ValueError("step_counts must be non-empty")
    if counts[0] < 1 or any(b <= a for a, b in zip(counts, counts[1:])):
        raise ValueError("step_counts must be positive and strictly increasing")
    if metric is ErrorMetric.STATE_VECTOR_NORM:
        if xi is None:
            raise ValueError("xi is required for the state_vector_norm metric")
        xi = as_state(xi, h.dim, "xi")

    exact = h.propagate_exact(t)
    errors = []
    for n in counts:
        diff = trotter_evolve(h, t, n).matrix - exact
        if metric is ErrorMetric.STATE_VECTOR_NORM:
            errors.append(float(np.linalg.norm(diff @ xi)))
        else:
            errors.append(operator_norm(diff))
    return ConvergenceReport(
        t=float(t),
        step_counts=tuple(counts),
        errors=tuple(errors),
        fitted_order=fit_order(counts, errors),
        metric=metric,
        xi=xi if metric is ErrorMetric.STATE_VECTOR_NORM else None,
    )
