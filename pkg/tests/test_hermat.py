"""Factorization layer: pivoted LDL*, inertia, Cholesky, dense eigensolves."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spectra.hermat import (
    HermitianMatrix,
    Inertia,
    NotPositiveDefinite,
    SingularFactor,
    cholesky,
    default_zero_tol,
    eigh,
    eigh_gen,
    inertia_of,
    ldl_factor,
    solve_with,
)


def _rng(seed):
    return np.random.default_rng(seed)


def _random_hermitian(rng, n):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (A + A.conj().T)


def _planted(rng, eigs):
    """Hermitian matrix with exactly the given spectrum.

    Zero eigenvalues stay exactly zero: only the nonzero part of the spectrum
    is rotated by a dense unitary, and the zero rows/columns are mixed in by a
    permutation (exact in floating point).  Conjugating a diagonal with zeros
    by a dense Q would smear them into +/-1e-16 noise of arbitrary sign.
    """
    eigs = np.asarray(eigs, dtype=float)
    n = len(eigs)
    nz = np.flatnonzero(eigs)
    k = len(nz)
    Q, _ = np.linalg.qr(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)))
    A = np.zeros((n, n), dtype=complex)
    A[:k, :k] = Q @ np.diag(eigs[nz]) @ Q.conj().T
    p = rng.permutation(n)
    return A[np.ix_(p, p)]


class TestHermitianMatrix:
    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            HermitianMatrix(np.ones((2, 3)))

    def test_rejects_large_asymmetry(self):
        A = np.array([[1.0, 2.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            HermitianMatrix(A)

    def test_symmetrizes_roundoff(self):
        A = np.array([[2.0, 1.0 + 1e-15], [1.0, 3.0]])
        H = HermitianMatrix(A)
        assert np.array_equal(H.data, H.data.conj().T)
        assert H.herm_defect <= 1e-14

    def test_data_is_write_protected(self):
        H = HermitianMatrix(np.eye(2))
        with pytest.raises(ValueError):
            H.data[0, 0] = 5.0

    def test_empty_matrix(self):
        H = HermitianMatrix(np.zeros((0, 0)))
        assert H.n == 0 and H.maxabs() == 0.0


class TestInertia:
    def test_planted_signs(self):
        A = _planted(_rng(7), [-3.0, -1.0, -0.5, 2e-14, 1.0, 4.0, 9.0, 11.0])
        assert inertia_of(A).as_tuple() == (3, 1, 4)

    @pytest.mark.parametrize("eigs,expect", [
        ([1.0, 2.0], (0, 0, 2)),
        ([-1.0], (1, 0, 0)),
        ([0.0, 0.0, 5.0], (0, 2, 1)),
        ([-2.0, 0.0, 3.0, 4.0], (1, 1, 2)),
    ])
    def test_small_planted(self, eigs, expect):
        A = _planted(_rng(11), eigs)
        assert inertia_of(A).as_tuple() == expect

    def test_zero_matrix(self):
        assert inertia_of(np.zeros((4, 4))).as_tuple() == (0, 4, 0)

    def test_empty(self):
        assert inertia_of(np.zeros((0, 0))).as_tuple() == (0, 0, 0)

    def test_antidiagonal_needs_block_pivot(self):
        # zero diagonal: only 2x2 pivots can factor this
        A = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert inertia_of(A).as_tuple() == (1, 0, 1)

    def test_total(self):
        i = Inertia(n_neg=2, n_zero=1, n_pos=3)
        assert i.total == 6

    @given(st.integers(0, 10**6))
    def test_matches_eigenvalue_signs(self, seed):
        rng = _rng(seed)
        n = int(rng.integers(1, 12))
        A = _random_hermitian(rng, n)
        w = np.linalg.eigvalsh(A)
        got = inertia_of(A, zero_tol=0.0)
        # random Gaussian spectra have no exact zeros
        assert (got.n_neg, got.n_pos) == (int(np.sum(w < 0)), int(np.sum(w > 0)))
        assert got.n_zero == 0

    @given(st.integers(0, 10**6))
    def test_congruence_invariance(self, seed):
        """Inertia survives congruence by any invertible factor, exactly."""
        rng = _rng(seed)
        n = int(rng.integers(1, 10))
        A = _random_hermitian(rng, n)
        C = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        C += np.eye(n) * 3.0  # keep comfortably invertible
        assert inertia_of(C.conj().T @ A @ C) == inertia_of(A)


class TestLdlFactor:
    @given(st.integers(0, 10**6))
    def test_reconstruction(self, seed):
        rng = _rng(seed)
        n = int(rng.integers(1, 14))
        A = _random_hermitian(rng, n)
        f = ldl_factor(A)
        R = f.reconstruct()
        assert np.max(np.abs(R - A)) <= 1e-10 * max(np.max(np.abs(A)), 1.0)

    def test_inertia_attached(self):
        A = _planted(_rng(3), [-5.0, -1.0, 2.0, 3.0, 7.0])
        assert ldl_factor(A).inertia.as_tuple() == (2, 0, 3)

    def test_permutation_is_valid(self):
        f = ldl_factor(_random_hermitian(_rng(5), 9))
        assert sorted(f.permutation) == list(range(9))

    def test_zero_tol_validation(self):
        A = np.eye(3)
        with pytest.raises(ValueError):
            ldl_factor(A, zero_tol=-1e-3)
        with pytest.raises(ValueError):
            ldl_factor(A, zero_tol=1.0)

    def test_block_diagonal_matches_blocks(self):
        A = _random_hermitian(_rng(8), 7)
        f = ldl_factor(A)
        D = f.block_diagonal_matrix()
        mags = f.pivot_magnitudes()
        assert D.shape == (7, 7)
        assert mags.shape == (7,)
        assert np.all(mags >= 0.0)


class TestSolveWith:
    @given(st.integers(0, 10**6))
    def test_residual(self, seed):
        rng = _rng(seed)
        n = int(rng.integers(1, 12))
        A = _random_hermitian(rng, n) + 2.0 * np.eye(n)
        b = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
        x = solve_with(ldl_factor(A), b)
        assert np.max(np.abs(A @ x - b)) <= 1e-9 * np.max(np.abs(A)) * max(np.max(np.abs(x)), 1.0)

    def test_vector_rhs(self):
        A = _random_hermitian(_rng(2), 5) + 3.0 * np.eye(5)
        b = np.arange(5.0)
        x = solve_with(ldl_factor(A), b)
        assert x.shape == (5,)
        assert np.max(np.abs(A @ x - b)) <= 1e-10 * np.max(np.abs(A))

    def test_singular_raises(self):
        A = np.diag([1.0, 0.0, 2.0])
        with pytest.raises(SingularFactor):
            solve_with(ldl_factor(A), np.ones(3))


class TestCholesky:
    def test_identity(self):
        R = cholesky(np.eye(3))
        assert np.allclose(R, np.eye(3))

    def test_factor_property(self):
        A = _random_hermitian(_rng(13), 6)
        A = A @ A.conj().T + np.eye(6)
        R = cholesky(A)
        assert np.max(np.abs(R.conj().T @ R - A)) <= 1e-12 * np.max(np.abs(A))
        assert np.allclose(R, np.triu(R))

    def test_indefinite_reports_failing_index(self):
        with pytest.raises(NotPositiveDefinite) as exc:
            cholesky(np.diag([1.0, -1.0]))
        assert exc.value.index == 1

    def test_hilbert_is_positive_definite(self):
        n = 5
        H = np.array([[1.0 / (i + j + 1) for j in range(n)] for i in range(n)])
        cholesky(H)  # must not raise
        assert inertia_of(H).as_tuple() == (0, 0, n)


class TestEigh:
    def test_planted_spectrum(self):
        eigs = [-2.0, -0.5, 1.5, 6.0]
        w, V = eigh(_planted(_rng(17), eigs))
        assert np.max(np.abs(w - np.array(eigs))) <= 1e-10
        assert np.max(np.abs(V.conj().T @ V - np.eye(4))) <= 1e-12

    @given(st.integers(0, 10**6))
    def test_gen_residual(self, seed):
        """Generalized pairs satisfy A x = mu B x to working accuracy."""
        rng = _rng(seed)
        n = int(rng.integers(1, 10))
        A = _random_hermitian(rng, n)
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        B = M.conj().T @ M + np.eye(n)
        w, X = eigh_gen(A, B, vectors=True)
        for k in range(n):
            r = A @ X[:, k] - w[k] * (B @ X[:, k])
            bound = 1e-9 * (np.max(np.abs(A)) + abs(w[k]) * np.max(np.abs(B)))
            assert np.max(np.abs(r)) <= bound

    def test_gen_reduces_to_ordinary_for_identity_weight(self):
        A = _random_hermitian(_rng(23), 7)
        w_gen = eigh_gen(A, np.eye(7))
        w_ord, _ = eigh(A)
        assert np.max(np.abs(w_gen - w_ord)) <= 1e-10 * max(np.max(np.abs(w_ord)), 1.0)

    def test_gen_rejects_indefinite_weight(self):
        with pytest.raises(NotPositiveDefinite):
            eigh_gen(np.eye(2), np.diag([1.0, -1.0]))

    def test_empty(self):
        w = eigh_gen(np.zeros((0, 0)), np.zeros((0, 0)))
        assert w.shape == (0,)


def test_default_zero_tol_scales_with_dimension():
    assert default_zero_tol(1) == pytest.approx(1e-10)
    assert default_zero_tol(100) == pytest.approx(1e-8)
