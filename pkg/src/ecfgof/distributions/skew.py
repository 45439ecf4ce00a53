"""Skew-normal, skew-t and skew-Laplace: samplers, CFs, densities and
canonical forms."""

from dataclasses import dataclass

import numpy as np
from scipy import special

from ..linalg import orthonormal_basis_from, psd_factor, spd_sqrt_inv, cholesky
from ..rng import gamma, inverse_gamma
from .params import SlParams, SnParams, StParams

_LOG2PI = np.log(2 * np.pi)
SN_CF_TMAX = 6.0


def _rows(x, p):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1) if x.size == p else x.reshape(-1, 1)
    if x.shape[1] != p:
        raise ValueError(f"expected {p} columns, got {x.shape[1]}")
    return x


def _tgrid(t, p):
    t = np.asarray(t, dtype=float)
    single = t.ndim == 1
    return np.atleast_2d(t).reshape(-1, p), single


# -- skew-normal ---------------------------------------------------------


def sample_sn(params, n, stream):
    """Additive representation ``xi + omega (delta |Z0| + V)``,
    ``V ~ N_p(0, Omega_bar - delta delta')``."""
    p = params.dim
    delta = params.delta
    fac = psd_factor(params.corr - np.outer(delta, delta))
    z0 = np.abs(stream.standard_normal(n))
    v = stream.standard_normal((n, p)) @ fac.T
    return params.xi + (np.outer(z0, delta) + v) * params.scales


def tau_imag(x):
    """``tau(x) = int_0^x sqrt(2/pi) exp(u^2/2) du``, i.e. ``2 Phi(i x) = 1 + i tau(x)``."""
    return special.erfi(np.asarray(x, dtype=float) / np.sqrt(2.0))


def cf_sn(params, t):
    t, single = _tgrid(t, params.dim)
    if np.any(np.linalg.norm(t, axis=1) > SN_CF_TMAX):
        raise ValueError(f"cf_sn is evaluated only for ||t|| <= {SN_CF_TMAX}")
    om = params.omega
    eta = params.alpha / params.scales
    u = (t @ om @ eta) / np.sqrt(1.0 + params.alpha @ params.corr @ params.alpha)
    quad = np.einsum("ij,jk,ik->i", t, om, t)
    out = np.exp(1j * (t @ params.xi) - 0.5 * quad) * (1 + 1j * tau_imag(u))
    return out[0] if single else out


def sn_logpdf(params, x):
    p = params.dim
    x = _rows(x, p)
    r = x - params.xi
    chol = cholesky(params.omega)
    z = np.linalg.solve(chol, r.T)
    quad = np.sum(z * z, axis=0)
    logdet = 2 * np.sum(np.log(np.diag(chol)))
    eta = params.alpha / params.scales
    return np.log(2) - 0.5 * (p * _LOG2PI + logdet + quad) + special.log_ndtr(r @ eta)


# -- skew-t --------------------------------------------------------------


def sample_st(params, n, stream):
    """``Y = xi + sqrt(eta) X`` with ``eta ~ IG(nu/2, nu/2)``, ``X ~ SN_p(0, Omega, alpha)``."""
    p = params.dim
    if np.isinf(params.nu):
        eta = np.ones(n)
    else:
        eta = inverse_gamma(stream, params.nu / 2, params.nu / 2, n)
    x = sample_sn(SnParams(np.zeros(p), params.omega, params.alpha), n, stream)
    return params.xi + np.sqrt(eta)[:, None] * x


def st_logpdf(params, x):
    """Azzalini-Capitanio skew-t log-density."""
    p = params.dim
    nu = params.nu
    x = _rows(x, p)
    r = x - params.xi
    chol = cholesky(params.omega)
    z = np.linalg.solve(chol, r.T)
    quad = np.sum(z * z, axis=0)
    logdet = 2 * np.sum(np.log(np.diag(chol)))
    eta = params.alpha / params.scales
    if np.isinf(nu):
        return sn_logpdf(SnParams(params.xi, params.omega, params.alpha), x)
    logt = (
        special.gammaln((nu + p) / 2)
        - special.gammaln(nu / 2)
        - 0.5 * p * np.log(nu * np.pi)
        - 0.5 * logdet
        - 0.5 * (nu + p) * np.log1p(quad / nu)
    )
    arg = (r @ eta) * np.sqrt((nu + p) / (quad + nu))
    return np.log(2) + logt + _t_logcdf(arg, nu + p)


def _t_logcdf(x, df):
    # stdtr loses everything in the far left tail; switch to the
    # symmetric survival form there
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    left = x < -5
    out[~left] = np.log(special.stdtr(df, x[~left]))
    if np.any(left):
        from scipy import stats

        out[left] = stats.t.logsf(-x[left], df)
    return out


# -- skew-Laplace --------------------------------------------------------


def sample_sl(params, n, stream):
    """Gamma((p+1)/2, scale 2) variance-mean mixture ``xi + W alpha + sqrt(W) L z``."""
    p = params.dim
    w = gamma(stream, (p + 1) / 2, 2.0, n)
    z = stream.standard_normal((n, p)) @ cholesky(params.omega).T
    return params.xi + np.outer(w, params.alpha) + np.sqrt(w)[:, None] * z


def cf_sl(params, t):
    p = params.dim
    t, single = _tgrid(t, p)
    quad = np.einsum("ij,jk,ik->i", t, params.omega, t)
    base = 1 + quad - 2j * (t @ params.alpha)
    out = np.exp(1j * (t @ params.xi)) * base ** (-(p + 1) / 2)
    return out[0] if single else out


def sl_logpdf(params, x):
    """Closed-form log-density of the skew-Laplace law.

    Integrating the Gamma mixing variable out leaves a Bessel K of order
    1/2, which is elementary::

        f(x) = exp(a'(x-xi) - sqrt((1 + a'Oa) Q)) / (2^p pi^((p-1)/2)
               Gamma((p+1)/2) |O|^(1/2) sqrt(1 + a'Oa))

    with ``O = Omega^{-1}`` folded into the quadratic forms and
    ``Q = (x-xi)' Omega^{-1} (x-xi)``.
    """
    p = params.dim
    x = _rows(x, p)
    if not np.all(np.isfinite(x)):
        raise ValueError("sl_logpdf needs finite arguments")
    r = x - params.xi
    chol = cholesky(params.omega)
    z = np.linalg.solve(chol, r.T)
    quad = np.sum(z * z, axis=0)
    ainv = np.linalg.solve(chol, params.alpha)
    aoa = ainv @ ainv
    lin = ainv @ z
    logdet = 2 * np.sum(np.log(np.diag(chol)))
    const = (
        -p * np.log(2)
        - 0.5 * (p - 1) * np.log(np.pi)
        - special.gammaln((p + 1) / 2)
        - 0.5 * logdet
        - 0.5 * np.log1p(aoa)
    )
    return const + lin - np.sqrt((1 + aoa) * quad)


# -- canonical forms -----------------------------------------------------


@dataclass(frozen=True)
class CanonicalInfo:
    """``H`` maps ``x`` to ``H' (x - xi)``; ``params`` is the canonical law."""

    H: np.ndarray
    params: object

    @property
    def alpha_star(self):
        return float(self.params.alpha[0])


def _canonical_direction(omega, direction, tiny=1e-10):
    root_inv = spd_sqrt_inv(omega)
    u = root_inv @ direction
    norm = np.linalg.norm(u)
    if norm < tiny:
        return root_inv, 0.0
    return root_inv @ orthonormal_basis_from(u), norm


def canonical_sn(params):
    p = params.dim
    direction = params.scales * params.delta
    H, _ = _canonical_direction(params.omega, direction)
    a_star = np.zeros(p)
    a_star[0] = params.alpha_star
    return CanonicalInfo(H, SnParams(np.zeros(p), np.eye(p), a_star))


def canonical_st(params):
    info = canonical_sn(params.sn)
    c = info.params
    return CanonicalInfo(info.H, StParams(c.xi, c.omega, c.alpha, params.nu))


def canonical_sl(params):
    p = params.dim
    H, a_star = _canonical_direction(params.omega, params.alpha)
    alpha = np.zeros(p)
    alpha[0] = a_star
    return CanonicalInfo(H, SlParams(np.zeros(p), np.eye(p), alpha))
