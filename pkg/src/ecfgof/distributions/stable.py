"""Multivariate alpha-stable laws with a discrete spectral measure."""

import numpy as np

from ..rng import univariate_stable


def psi_alpha(u, alpha):
    """Spectral exponent of the S^0 parameterization."""
    u = np.asarray(u, dtype=float)
    au = np.abs(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        if alpha == 1.0:
            logu = np.where(au > 0, np.log(np.where(au > 0, au, 1.0)), 0.0)
            return au * (1 + 1j * (2 / np.pi) * np.sign(u) * logu)
        corr = np.where(au > 0, au ** (1 - alpha) - 1, -1.0)
        out = au**alpha * (1 + 1j * np.sign(u) * np.tan(np.pi * alpha / 2) * corr)
    return np.where(au > 0, out, 0.0)


def cf_as(params, t):
    p = params.dim
    t = np.asarray(t, dtype=float)
    single = t.ndim == 1
    t = np.atleast_2d(t).reshape(-1, p)
    proj = t @ params.atoms.T
    expo = -(psi_alpha(proj, params.index) @ params.weights) + 1j * (t @ params.xi)
    out = np.exp(expo)
    return out[0] if single else out


def shifted_location(params):
    """The location added after mixing the atoms: ``xi - tan(pi a/2) sum_i gamma_i s_i``
    (just ``xi`` when the index is 1)."""
    a = params.index
    if a == 1.0:
        return params.xi.copy()
    return params.xi - np.tan(np.pi * a / 2) * (params.weights @ params.atoms)


def sample_as(params, n, stream):
    """Draws by mixing independent totally skewed stable variables along the atoms."""
    a = params.index
    k = params.weights.size
    z = univariate_stable(stream, a, 1.0, 1.0, 0.0, size=(n, k))
    gam = params.weights
    if a == 1.0:
        coef = gam * (z + (2 / np.pi) * np.log(gam))
    else:
        coef = gam ** (1 / a) * z
    return coef @ params.atoms + shifted_location(params)
