"""Projection estimator for bivariate alpha-stable laws with a discrete
spectral measure.

Every projection ``u'X`` is univariate stable (1-parameterization) with

    sigma(u)^a        = sum_i gamma_i |u's_i|^a
    beta(u) sigma(u)^a = sum_i gamma_i |u's_i|^a sign(u's_i)
    mu(u)             = u' xi_shift,  xi_shift = xi - tan(pi a/2) sum_i gamma_i s_i

so univariate fits along a grid of directions give a linear system for
the atom weights and for the location.  Univariate fits use regression on
the empirical CF: ``log(-log|phi(t)|^2)`` is linear in ``log t`` with
slope ``a``, and ``arg phi(t)`` is linear in ``(t, t^a)``.
"""

import warnings

import numpy as np
from scipy import optimize, stats

from ..distributions import AsParams
from ..statistic import as_sample
from .result import EstimationError, FitResult

MOD_GRID = np.pi * np.arange(1, 11) / 25
ARG_GRID = np.pi * np.arange(1, 11) / 50
REFINEMENTS = 3
TRIM = 0.2
ALPHA_RANGE = (0.1, 2.0)


def _mcculloch(x):
    """Quantile-based start (McCulloch) for one column, in the 1-parameterization."""
    try:
        # private helper of scipy's levy_stable; guarded because it is not public API
        from scipy.stats._levy_stable import _fitstart_S1

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            a, b, s, m = (float(v) for v in _fitstart_S1(np.asarray(x)))
        if np.isfinite([a, b, s, m]).all() and s > 0:
            return min(max(a, ALPHA_RANGE[0]), ALPHA_RANGE[1]), min(max(b, -1.0), 1.0), s, m
    except Exception:
        pass
    q25, q50, q75 = np.quantile(x, [0.25, 0.5, 0.75])
    return 2.0, 0.0, max((q75 - q25) / 1.908, 1e-12), q50


def _ecf_columns(x, t):
    """ECF of each column of ``x`` at the points ``t``: shape (len(t), ncol)."""
    arg = x[None, :, :] * t[:, None, None]
    return np.cos(arg).mean(axis=1) + 1j * np.sin(arg).mean(axis=1)


def _modulus_fit(phi, t, alpha=None):
    """``(alpha, sigma)`` per column from ``log(-log|phi|^2) = log(2 sigma^a) + a log t``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        yv = np.log(-np.log(np.abs(phi) ** 2))
    lt = np.log(t)
    ok = np.isfinite(yv)
    ncol = phi.shape[1]
    a = np.full(ncol, np.nan)
    s = np.full(ncol, np.nan)
    for j in range(ncol):
        m = ok[:, j]
        if m.sum() < 3:
            continue
        if alpha is None:
            slope, icpt = np.polyfit(lt[m], yv[m, j], 1)
        else:
            slope = alpha
            icpt = np.mean(yv[m, j] - slope * lt[m])
        if not ALPHA_RANGE[0] * 0.5 < slope <= 2.5:
            continue
        a[j] = min(slope, ALPHA_RANGE[1])
        s[j] = (np.exp(icpt) / 2) ** (1 / a[j])
    return a, s


def _skew_term(u, alpha, sigma):
    """Coefficient multiplying beta in ``arg phi(u)``, for a unit-located law."""
    if abs(alpha - 1) < 1e-3:
        return -sigma * (2 / np.pi) * u * np.log(u)
    return sigma**alpha * np.tan(np.pi * alpha / 2) * u**alpha


def _arg_fit(phi, u, alpha, sigma, beta=None):
    """``(beta, mu)`` per column from the unwrapped argument of the ECF."""
    ang = np.unwrap(np.angle(phi), axis=0)
    ncol = phi.shape[1]
    b = np.zeros(ncol)
    m = np.zeros(ncol)
    for j in range(ncol):
        sk = _skew_term(u, alpha[j], sigma[j])
        if beta is not None:
            b[j] = beta[j]
            m[j] = u @ (ang[:, j] - beta[j] * sk) / (u @ u)
        elif np.max(np.abs(sk)) < 1e-6 * np.max(u):
            m[j] = u @ ang[:, j] / (u @ u)
        else:
            coef, *_ = np.linalg.lstsq(np.column_stack([u, sk]), ang[:, j], rcond=None)
            m[j], b[j] = coef[0], np.clip(coef[1], -1.0, 1.0)
    return b, m


def _rescale(alpha, beta, s_std, m_std, scale, loc):
    """Map S1 parameters of ``(X - loc)/scale`` back to ``X``."""
    sigma = scale * s_std
    mu = scale * m_std + loc
    one = np.abs(alpha - 1) < 1e-3
    mu = np.where(one, mu - (2 / np.pi) * beta * sigma * np.log(scale), mu)
    return sigma, mu


def fit_stable_ecf(x, alpha=None, refinements=REFINEMENTS):
    """Univariate stable fit for each column of ``x`` (1-parameterization).

    Returns arrays ``(alpha, beta, sigma, mu)``.  Columns are standardized by
    a McCulloch start, then ``refinements`` rounds of ECF regression are run,
    each re-standardizing by the previous round.  A column whose regression
    is ill-posed keeps its McCulloch values.  Passing ``alpha`` (scalar)
    fixes the index.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = as_sample(x)
    ncol = x.shape[1]
    start = np.array([_mcculloch(x[:, j]) for j in range(ncol)])
    a, b, sig, mu = (start[:, i].copy() for i in range(4))
    if alpha is not None:
        a[:] = alpha
    for _ in range(refinements):
        xs = (x - mu) / sig
        a_new, s_std = _modulus_fit(_ecf_columns(xs, MOD_GRID), MOD_GRID, alpha)
        bad = ~np.isfinite(a_new)
        a_use = np.where(bad, a, a_new)
        s_std = np.where(bad, 1.0, s_std)
        b_new, m_std = _arg_fit(_ecf_columns(xs, ARG_GRID), ARG_GRID, a_use, s_std)
        s_new, mu_new = _rescale(a_use, b_new, s_std, m_std, sig, mu)
        keep = ~bad
        a[keep], b[keep], sig[keep], mu[keep] = a_use[keep], b_new[keep], s_new[keep], mu_new[keep]
    if single:
        return float(a[0]), float(b[0]), float(sig[0]), float(mu[0])
    return a, b, sig, mu


def directions(n_dir):
    ang = 2 * np.pi * np.arange(1, n_dir + 1) / n_dir
    return np.column_stack([np.cos(ang), np.sin(ang)])


def _weights_nnls(dirs, atoms, alpha, sigma, beta):
    proj = dirs @ atoms.T
    mag = np.abs(proj) ** alpha
    w = min(1.0, abs(np.tan(np.pi * alpha / 2)))
    design = np.vstack([mag, w * mag * np.sign(proj)])
    rhs = np.concatenate([sigma**alpha, w * sigma**alpha * beta])
    gam, resid = optimize.nnls(design, rhs)
    return gam, resid


def _location(dirs, atoms, gam, alpha, mu):
    """Least-squares ``xi`` from the projected locations."""
    if abs(alpha - 1) < 1e-3:
        proj = dirs @ atoms.T
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = np.where(proj != 0, proj * np.log(np.abs(proj)), 0.0) @ gam
        xi, *_ = np.linalg.lstsq(dirs, mu + (2 / np.pi) * corr, rcond=None)
        return xi
    shifted, *_ = np.linalg.lstsq(dirs, mu, rcond=None)
    return shifted + np.tan(np.pi * alpha / 2) * (gam @ atoms)


def fit_as(x, grid_size=24, fixed=None):
    """Projection estimate of ``AS_2(xi, Gamma, alpha)``.

    ``fixed``, an :class:`AsParams`, holds the spectral measure and index
    at its values so that only the location is estimated.
    """
    x = as_sample(x)
    n, p = x.shape
    if p != 2:
        raise EstimationError("the projection estimator handles bivariate data only")
    if n < 100:
        raise EstimationError(f"need at least 100 observations, got {n}")
    if grid_size < 4:
        raise EstimationError("grid_size must be at least 4")
    dirs = directions(grid_size)
    proj = x @ dirs.T
    if np.any(np.ptp(proj, axis=0) == 0):
        raise EstimationError("degenerate projection: data constant along a direction")
    notes = []
    if fixed is not None:
        alpha = fixed.index
        atoms, gam = fixed.atoms, fixed.weights
        pa = np.abs(dirs @ atoms.T) ** alpha
        sig = (pa @ gam) ** (1 / alpha)
        beta = np.where(sig > 0, ((pa * np.sign(dirs @ atoms.T)) @ gam) / np.maximum(sig**alpha, 1e-300), 0.0)
        _, _, _, mu0 = fit_stable_ecf(proj, alpha=alpha)
        scale = np.maximum(sig, 1e-12)
        xs = (proj - mu0) / scale
        _, m_std = _arg_fit(_ecf_columns(xs, ARG_GRID), ARG_GRID, np.full(grid_size, alpha), np.ones(grid_size), beta)
        _, mu = _rescale(np.full(grid_size, alpha), beta, np.ones(grid_size), m_std, scale, mu0)
        xi = _location(dirs, atoms, gam, alpha, mu)
        return FitResult(AsParams(xi, atoms, gam, alpha), 0.0, True, 1, notes)
    a_dir, _, _, _ = fit_stable_ecf(proj)
    alpha = float(np.clip(stats.trim_mean(a_dir, TRIM), ALPHA_RANGE[0], ALPHA_RANGE[1]))
    _, beta, sig, mu = fit_stable_ecf(proj, alpha=alpha)
    gam, resid = _weights_nnls(dirs, dirs, alpha, sig, beta)
    keep = gam > 1e-12 * max(gam.max(), 1e-300)
    if not keep.any():
        raise EstimationError("non-negative least squares left no atom with positive weight")
    atoms, gam = dirs[keep], gam[keep]
    xi = _location(dirs, atoms, gam, alpha, mu)
    params = AsParams(xi, atoms, gam, alpha)
    return FitResult(params, -float(resid), True, 1, notes)
