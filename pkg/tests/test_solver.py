"""Direct SPD solve: accuracy, residual enforcement, error classification."""

import numpy as np
import pytest
import scipy.sparse as sp

from klshell import (IndefiniteSystemError, SingularSystemError, SparseSymmetric,
                     solve_spd)
from klshell.solver import relative_residual


class TestBasicSolves:
    def test_identity(self):
        K = sp.identity(5, format="csr")
        F = np.zeros(5)
        F[0] = 1.0
        U = solve_spd(K, F)
        assert np.allclose(np.asarray(U, float), F, atol=1e-15)

    def test_two_by_two_hand_solve(self):
        K = sp.csr_matrix(np.array([[2.0, 1.0], [1.0, 2.0]]))
        U = np.asarray(solve_spd(K, np.array([1.0, 1.0])), float)
        assert np.allclose(U, [1 / 3, 1 / 3], atol=1e-14)

    def test_zero_rhs(self):
        K = sp.identity(4, format="csr")
        U = solve_spd(K, np.zeros(4))
        assert np.all(np.asarray(U) == 0.0)

    def test_sparse_symmetric_round_trip(self):
        rng = np.random.default_rng(0)
        B = rng.random((6, 6))
        K = sp.csr_matrix(B @ B.T + 6 * np.eye(6))
        S = SparseSymmetric.from_csr(K)
        assert S.n == 6
        assert np.allclose(S.to_csr().toarray(), K.toarray(), atol=1e-15)


class TestResidualContract:
    def test_benchmark_residual(self, bench):
        """Moderate-slenderness solves certify the 1e-10 residual bound."""
        for slend in (1e1, 1e2):
            lvl = bench.strip_level("cas", 3, slend, 64)
            assert lvl["residual"] <= 1e-10

    def test_ordering_independence(self):
        rng = np.random.default_rng(3)
        B = rng.random((40, 40))
        K = sp.csr_matrix(B @ B.T + 40 * np.eye(40))
        F = rng.random(40)
        U = np.asarray(solve_spd(K, F), float)
        perm = rng.permutation(40)
        P = sp.csr_matrix((np.ones(40), (np.arange(40), perm)), shape=(40, 40))
        Kp = sp.csr_matrix(P @ K @ P.T)
        Up = np.asarray(solve_spd(Kp, P @ F), float)
        back = P.T @ Up
        assert np.linalg.norm(back - U) <= 1e-8 * np.linalg.norm(U)

    def test_relative_residual_helper(self):
        K = sp.csr_matrix(np.array([[2.0, 0.0], [0.0, 3.0]]))
        F = np.array([2.0, 3.0])
        assert relative_residual(K, np.array([1.0, 1.0]), F) < 1e-15


class TestErrorClassification:
    def test_indefinite_raises(self):
        K = sp.csr_matrix(np.array([[1.0, 2.0], [2.0, 1.0]]))
        with pytest.raises(IndefiniteSystemError):
            solve_spd(K, np.array([1.0, 1.0]))

    def test_singular_raises(self):
        K = sp.csr_matrix(np.zeros((3, 3)))
        with pytest.raises(SingularSystemError):
            solve_spd(K, np.ones(3))

    def test_semidefinite_with_orthogonal_load_is_tolerated(self):
        """A zero-energy mode orthogonal to the load does not block the solve."""
        B = np.diag([1.0, 2.0, 3.0, 0.0])
        Q, _ = np.linalg.qr(np.random.default_rng(5).random((4, 4)))
        K = sp.csr_matrix(Q @ B @ Q.T)
        F = K @ np.array([1.0, -1.0, 0.5, 2.0])  # in the range space
        U = np.asarray(solve_spd(K, np.asarray(F)), float)
        assert relative_residual(K, U, F) <= 1e-10
