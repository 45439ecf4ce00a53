"""Small dense symmetric linear algebra used by the canonical transforms."""

import numpy as np

_SYM_RTOL = 1e-12


def _as_square(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def check_symmetric(a, rtol=_SYM_RTOL):
    a = _as_square(a)
    scale = max(np.max(np.abs(a)), np.finfo(float).tiny)
    if np.max(np.abs(a - a.T)) > rtol * scale:
        raise ValueError("matrix is not symmetric")
    return a


def sym_eigen(a):
    """Eigen-decomposition of a symmetric matrix.

    Returns ``(Q, lam)`` with eigenvalues ascending and each eigenvector
    column signed so that its first non-negligible entry is positive.
    """
    a = check_symmetric(a)
    a = 0.5 * (a + a.T)
    lam, q = np.linalg.eigh(a)
    for j in range(q.shape[1]):
        col = q[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-14)
        if idx.size and col[idx[0]] < 0:
            q[:, j] = -col
    return q, lam


def spd_sqrt_inv(a):
    """Inverse of the symmetric positive definite square root of ``a``."""
    q, lam = sym_eigen(a)
    if lam[0] <= 0 or lam[0] <= 1e-15 * lam[-1]:
        raise np.linalg.LinAlgError("matrix is not numerically positive definite")
    b = (q / np.sqrt(lam)) @ q.T
    return 0.5 * (b + b.T)


def spd_sqrt(a):
    q, lam = sym_eigen(a)
    if lam[0] <= 0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    b = (q * np.sqrt(lam)) @ q.T
    return 0.5 * (b + b.T)


def cholesky(a):
    """Lower Cholesky factor; raises ``LinAlgError`` on a non-SPD pivot."""
    a = check_symmetric(a)
    return np.linalg.cholesky(0.5 * (a + a.T))


def psd_factor(a):
    """A factor ``F`` with ``F @ F.T == a`` that tolerates rank deficiency.

    Used for covariances such as ``Omega_bar - delta delta^T`` that can be
    singular to working precision when the skewness is extreme.
    """
    a = 0.5 * (np.asarray(a, dtype=float) + np.asarray(a, dtype=float).T)
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        lam, q = np.linalg.eigh(a)
        return q * np.sqrt(np.clip(lam, 0.0, None))


def orthonormal_basis_from(v):
    """Orthogonal matrix whose first column is ``v / ||v||``.

    The remaining columns come from Gram-Schmidt applied to the canonical
    vectors, skipping the one indexed by the largest-magnitude entry of
    ``v``, so the result is a deterministic function of the direction.
    """
    v = np.asarray(v, dtype=float).ravel()
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0.0:
        raise ValueError("cannot build a basis from the zero vector")
    p = v.size
    k = int(np.argmax(np.abs(v)))
    basis = [v / norm]
    for j in range(p):
        if j == k:
            continue
        u = np.zeros(p)
        u[j] = 1.0
        # two passes of classical Gram-Schmidt keep the columns orthonormal
        # to working precision
        for _ in range(2):
            for b in basis:
                u = u - (b @ u) * b
        basis.append(u / np.linalg.norm(u))
    return np.column_stack(basis)
