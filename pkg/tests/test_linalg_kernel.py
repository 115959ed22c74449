import numpy as np
import pytest
from hypothesis import given, strategies as st

from jisodoa.linalg_kernel import (
    ContractError,
    LinAlgFailure,
    hermitian_eig,
    hermitian_inverse_loaded,
    hermitian_solve_loaded,
    least_squares_solve,
)

from conftest import random_hermitian


def test_inverse_identity():
    assert np.allclose(hermitian_inverse_loaded(np.eye(3), 0.0), np.eye(3), atol=1e-15)


def test_inverse_scalar_loading():
    assert np.allclose(hermitian_inverse_loaded(np.eye(2), 0.5), (2 / 3) * np.eye(2), atol=1e-15)


def test_inverse_multiplies_back(rng):
    M = random_hermitian(rng, 4, pd=True)
    inv = hermitian_inverse_loaded(M, 5e-4)
    assert np.allclose((M + 5e-4 * np.eye(4)) @ inv, np.eye(4), atol=1e-9)


def test_inverse_rejects_non_hermitian():
    with pytest.raises(ContractError):
        hermitian_inverse_loaded(np.array([[1.0, 2.0], [0.0, 1.0]]), 0.0)


def test_inverse_rejects_negative_loading():
    with pytest.raises(ContractError):
        hermitian_inverse_loaded(np.eye(2), -1.0)


def test_inverse_singular_reports_condition():
    with pytest.raises(LinAlgFailure, match="condition estimate"):
        hermitian_inverse_loaded(np.zeros((3, 3)), 0.0)


@given(p=st.integers(1, 8), seed=st.integers(0, 2**32 - 1),
       delta=st.floats(0.0, 10.0))
def test_loaded_inverse_properties(p, seed, delta):
    rng = np.random.default_rng(seed)
    M = random_hermitian(rng, p, pd=True)
    inv = hermitian_inverse_loaded(M, delta)
    scale = np.max(np.abs(inv))
    assert np.max(np.abs(inv - inv.conj().T)) <= 1e-10 * scale
    assert np.allclose((M + delta * np.eye(p)) @ inv, np.eye(p), atol=1e-9)


def test_solve_matches_inverse(rng):
    M = random_hermitian(rng, 5, pd=True)
    B = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    assert np.allclose(hermitian_solve_loaded(M, 1e-3, B),
                       hermitian_inverse_loaded(M, 1e-3) @ B, atol=1e-10)


def test_eig_diagonal():
    w, V = hermitian_eig(np.diag([1.0, 3.0]))
    assert np.allclose(w, [3, 1])
    assert np.allclose(np.abs(V), [[0, 1], [1, 0]])


def test_eig_symmetric_closed_form():
    w, V = hermitian_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(w, [3, 1])
    # eigenvectors are fixed only up to a unit-modulus factor
    assert np.isclose(abs(np.vdot(V[:, 0], np.array([1, 1]) / np.sqrt(2))), 1)
    assert np.isclose(abs(np.vdot(V[:, 1], np.array([1, -1]) / np.sqrt(2))), 1)


@given(p=st.integers(1, 8), seed=st.integers(0, 2**32 - 1))
def test_eig_reconstructs(p, seed):
    M = random_hermitian(np.random.default_rng(seed), p)
    w, V = hermitian_eig(M)
    assert np.all(np.diff(w) <= 0)
    assert np.allclose((V * w) @ V.conj().T, M, atol=1e-9)
    assert np.allclose(V.conj().T @ V, np.eye(p), atol=1e-9)
    assert np.allclose(M @ V, V * w, atol=1e-9 * max(1, np.abs(w).max()))


def test_lstsq_identity():
    assert np.allclose(least_squares_solve(np.eye(3), np.eye(3)), np.eye(3))


def test_lstsq_exact_fit(rng):
    B = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(least_squares_solve(np.eye(3), B), B)


def test_lstsq_planted_solution(rng):
    A = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
    X0 = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(least_squares_solve(A, A @ X0), X0, atol=1e-9)


def test_lstsq_matches_normal_equations(rng):
    A = rng.standard_normal((7, 2)) + 1j * rng.standard_normal((7, 2))
    B = rng.standard_normal((7, 2)) + 1j * rng.standard_normal((7, 2))
    AH = A.conj().T
    assert np.allclose(least_squares_solve(A, B), np.linalg.solve(AH @ A, AH @ B))


def test_lstsq_rank_deficient():
    A = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
    with pytest.raises(LinAlgFailure):
        least_squares_solve(A, np.ones((3, 2)))
