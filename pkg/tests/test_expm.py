import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trotterkit import expm as expm_mod
from trotterkit.expm import UnitaryOperator, evolve_state, exact_expm, taylor_expm
from trotterkit.hamiltonians import build_random_hermitian
from trotterkit.linalg import DimensionError, LinalgError, NotHermitianError

from conftest import random_state


def naive_taylor(a, terms=40):
    """Unscaled power series; only trustworthy for small ||a||."""
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def test_diagonal_exponential():
    e = np.array([1.0, 2.0, -0.5])
    u = exact_expm(np.diag(e), 0.3).matrix
    np.testing.assert_allclose(u, np.diag(np.exp(-1j * 0.3 * e)), atol=1e-15, rtol=0)


def test_diagonal_fast_path_skips_eigensolver(monkeypatch):
    def boom(_):
        raise AssertionError("eigensolver called")

    monkeypatch.setattr(expm_mod, "eig_hermitian", boom)
    exact_expm(np.diag([1.0, 2.0]), 1.0)
    with pytest.raises(AssertionError):
        exact_expm(np.array([[0, 1.0], [1, 0]]), 1.0)


def test_time_zero_is_identity():
    u = exact_expm(build_random_hermitian(6, 4), 0.0).matrix
    np.testing.assert_allclose(u, np.eye(6), atol=1e-14)


@pytest.mark.parametrize("t", [0.1, 0.7, 1.9])
def test_pauli_x_closed_form(paulis, t):
    i2, x = paulis[0], paulis[1]
    closed = math.cos(t) * i2 - 1j * math.sin(t) * x
    np.testing.assert_allclose(naive_taylor(-1j * t * x), closed, atol=1e-14)
    np.testing.assert_allclose(exact_expm(x, t).matrix, closed, atol=1e-14)


def test_exact_expm_errors():
    with pytest.raises(NotHermitianError):
        exact_expm(np.array([[0, 1.0], [0, 0]]), 1.0)
    with pytest.raises(LinalgError):
        exact_expm(np.eye(2), float("inf"))


def test_taylor_examples(paulis):
    x = paulis[1]
    np.testing.assert_array_equal(taylor_expm(np.zeros((3, 3)), 5), np.eye(3))
    np.testing.assert_allclose(taylor_expm(-1j * x * np.pi / 2, 20), -1j * x, atol=1e-12)
    nil = np.array([[0, 1.0], [0, 0]])
    np.testing.assert_array_equal(taylor_expm(nil, 3), np.eye(2) + nil)
    np.testing.assert_array_equal(taylor_expm(nil, 30), np.eye(2) + nil)


def test_taylor_scaling_level():
    # ||a||_F = 4 -> three halvings bring it to 0.5, so 2 terms give (I + a/8)^8
    a = np.diag([4.0, 0.0])
    np.testing.assert_allclose(taylor_expm(a, 2), np.diag([1.5**8, 1.0]), rtol=1e-15)


def test_taylor_non_hermitian():
    a = np.array([[1.0, 2.0], [0.0, 3.0]])
    e1, e3 = math.e, math.e**3
    expected = np.array([[e1, e3 - e1], [0, e3]])  # upper triangular closed form
    np.testing.assert_allclose(taylor_expm(a, 20), expected, rtol=1e-13)


def test_taylor_errors():
    with pytest.raises(ValueError):
        taylor_expm(np.eye(2), 0)
    with pytest.raises(LinalgError):
        taylor_expm(1000.0 * np.eye(2), 20)


def test_evolve_state_examples(paulis):
    z = paulis[3]
    psi = random_state(3, 0)
    np.testing.assert_array_equal(evolve_state(UnitaryOperator(np.eye(3)), psi), psi)

    energies, t = np.array([0.5, -1.0, 2.0]), 1.3
    out = evolve_state(exact_expm(np.diag(energies), t), psi)
    np.testing.assert_allclose(out, psi * np.exp(-1j * energies * t), atol=1e-15)

    out = evolve_state(exact_expm(z, np.pi), [1, 0])
    np.testing.assert_allclose(out, [-1, 0], atol=1e-15)

    with pytest.raises(DimensionError):
        evolve_state(exact_expm(z, 1.0), [1, 0, 0])


@settings(max_examples=25, deadline=None)
@given(dim=st.sampled_from([1, 2, 5, 16, 64]), seed=st.integers(0, 10**6), t=st.floats(-10, 10))
def test_unitarity(dim, seed, t):
    u = exact_expm(build_random_hermitian(dim, seed), t)
    assert u.unitarity_defect() <= 1e-9 * dim
    psi = random_state(dim, seed)
    assert abs(np.linalg.norm(evolve_state(u, psi)) - 1.0) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), s=st.floats(-5, 5), t=st.floats(-5, 5))
def test_group_law(seed, s, t):
    h = build_random_hermitian(6, seed)
    lhs = exact_expm(h, s).matrix @ exact_expm(h, t).matrix
    assert np.linalg.norm(lhs - exact_expm(h, s + t).matrix) <= 1e-8


@pytest.mark.parametrize("dim", [2, 4, 8, 16])
def test_taylor_oracle_agreement(dim):
    h = build_random_hermitian(dim, 100 + dim)
    t = 10.0 / np.linalg.norm(h, 2)
    diff = exact_expm(h, t).matrix - taylor_expm(-1j * h * t, 30)
    assert np.linalg.norm(diff) <= 1e-8 * dim


@pytest.mark.parametrize("seed", range(4))
def test_energy_conservation(seed):
    h = build_random_hermitian(8, seed)
    psi = random_state(8, seed)
    e0 = np.vdot(psi, h @ psi).real
    out = evolve_state(exact_expm(h, 7.5), psi)
    assert np.vdot(out, h @ out).real == pytest.approx(e0, rel=1e-8)
