import numpy as np
import pytest

from ecfgof.linalg import cholesky, orthonormal_basis_from, psd_factor, spd_sqrt, spd_sqrt_inv, sym_eigen

from conftest import random_spd, rng_for


def test_sym_eigen_identity():
    q, lam = sym_eigen(np.eye(2))
    assert np.allclose(lam, [1, 1])
    assert np.allclose(q @ q.T, np.eye(2))


def test_sym_eigen_diagonal_sorted_with_sign_convention():
    q, lam = sym_eigen(np.diag([4.0, 1.0]))
    assert np.allclose(lam, [1, 4])
    assert np.allclose(np.abs(q), [[0, 1], [1, 0]])
    for col in q.T:
        first = col[np.flatnonzero(np.abs(col) > 1e-14)[0]]
        assert first > 0


def test_sym_eigen_reconstructs():
    a = random_spd(rng_for(1), 4)
    q, lam = sym_eigen(a)
    assert np.allclose(q @ np.diag(lam) @ q.T, a, atol=1e-12)


def test_sym_eigen_rejects_asymmetric():
    with pytest.raises(ValueError):
        sym_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_spd_sqrt_inv_diagonal():
    assert np.allclose(spd_sqrt_inv(np.diag([4.0, 9.0])), np.diag([0.5, 1 / 3]))


def test_spd_roots_are_inverse_pair():
    a = random_spd(rng_for(2), 3)
    r, ri = spd_sqrt(a), spd_sqrt_inv(a)
    assert np.allclose(r @ r, a)
    assert np.allclose(ri @ a @ ri, np.eye(3), atol=1e-12)
    assert np.allclose(r @ ri, np.eye(3), atol=1e-12)


def test_spd_sqrt_inv_rejects_singular():
    with pytest.raises(np.linalg.LinAlgError):
        spd_sqrt_inv(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_cholesky_example():
    assert np.allclose(cholesky(np.array([[4.0, 2.0], [2.0, 5.0]])), [[2, 0], [1, 2]])


def test_cholesky_not_spd():
    with pytest.raises(np.linalg.LinAlgError):
        cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_psd_factor_rank_deficient():
    v = np.array([1.0, 2.0])
    f = psd_factor(np.outer(v, v))
    assert np.allclose(f @ f.T, np.outer(v, v), atol=1e-12)


def test_basis_from_e1_is_identity():
    assert np.allclose(orthonormal_basis_from([1.0, 0, 0]), np.eye(3))


def test_basis_scale_invariant_and_orthogonal():
    v = rng_for(3).standard_normal(4)
    b = orthonormal_basis_from(v)
    assert np.allclose(b.T @ b, np.eye(4), atol=1e-14)
    assert np.allclose(b[:, 0], v / np.linalg.norm(v))
    assert np.array_equal(b, orthonormal_basis_from(7.5 * v))


def test_basis_zero_vector():
    with pytest.raises(ValueError):
        orthonormal_basis_from(np.zeros(3))
