"""Maximum likelihood for the multivariate Tukey g-and-h family.

With ``Y = Omega tau(Z) + xi`` and independent standard normal
coordinates of ``Z``, the log-likelihood of a sample is

    l = -n log|det Omega| + sum_ij [log phi(u_ij) - log tau'(u_ij)],
    u_i = tau^{-1}(Omega^{-1}(Y_i - xi))

(the inverse applied coordinatewise).  It is maximized by Nelder-Mead over
``xi``, a log-diagonal Cholesky factor of Omega, ``g`` and ``log h``.
"""

import numpy as np
from scipy import stats

from ..distributions import GhParams, tau_gh, tau_gh_inv, tau_gh_inv_array, tau_gh_log_prime
from ..distributions.tukey import G_ZERO
from ..optim import OptimizerOpts, nelder_mead
from ..statistic import as_sample
from ._ghkernel import gh_nll_terms, warm_start
from .result import EstimationError, FitResult, n_tril, regularize, tril_pack, tril_unpack

_HALF_LOG2PI = 0.5 * np.log(2 * np.pi)
QUANTILE_LEVELS = (0.05, 0.1, 0.15, 0.2, 0.25)
H_START_FLOOR = 1e-3
GH_OPTS = OptimizerOpts(max_iter=20000, tol_x=1e-7, tol_f=1e-10, initial_step=0.1)


def gh_loglik(params, y, z0=None, return_u=False):
    """Vectorized log-likelihood; ``-inf`` if some row has no preimage."""
    y = as_sample(y)
    n = y.shape[0]
    sign, logdet = np.linalg.slogdet(params.omega)
    w = np.linalg.solve(params.omega, (y - params.xi).T).T
    u = tau_gh_inv_array(params.g, params.h, w, z0=z0)
    if not np.all(np.isfinite(u)):
        ll = -np.inf
    else:
        with np.errstate(over="ignore", invalid="ignore"):
            terms = -0.5 * u * u - _HALF_LOG2PI - tau_gh_log_prime(params.g, params.h, u)
        ll = float(-n * logdet + terms.sum())
        if not np.isfinite(ll):
            ll = -np.inf
    return (ll, u) if return_u else ll


def gh_loglik_reference(params, y):
    """Row-by-row recomputation through scalar root finding and the
    untransformed derivative; used to cross-check :func:`gh_loglik`."""
    y = np.asarray(y, dtype=float)
    inv = np.linalg.inv(params.omega)
    total = -y.shape[0] * np.log(abs(np.linalg.det(params.omega)))
    for row in y:
        w = inv @ (row - params.xi)
        for j in range(w.size):
            g, h = float(params.g[j]), float(params.h[j])
            u = tau_gh_inv(g, h, w[j])
            if abs(g) < G_ZERO:
                deriv = np.exp(h * u * u / 2) * (1 + h * u * u)
            else:
                deriv = np.exp(h * u * u / 2) * (np.exp(g * u) + h * u * (np.exp(g * u) - 1) / g)
            total += stats.norm.logpdf(u) - np.log(deriv)
    return float(total)


def quantile_gh(y, levels=QUANTILE_LEVELS):
    """Per-coordinate ``(g, h, A)`` from symmetric quantile pairs.

    ``g`` is the median of ``log(UHS/LHS)/z_p`` over the levels and
    ``(log A, h)`` come from regressing the log of the g-corrected spread on
    ``z_p^2 / 2``.
    """
    y = as_sample(y)
    lv = np.asarray(levels)
    zp = stats.norm.ppf(1 - lv)
    med = np.median(y, axis=0)
    lo = np.quantile(y, lv, axis=0)
    hi = np.quantile(y, 1 - lv, axis=0)
    uhs = np.maximum(hi - med, 1e-12)
    lhs = np.maximum(med - lo, 1e-12)
    g = np.median(np.log(uhs / lhs) / zp[:, None], axis=0)
    spread = np.maximum(hi - lo, 1e-12)
    gz = g[None, :] * zp[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = np.where(np.abs(gz) < 1e-8, 2 * zp[:, None], 2 * np.sinh(gz) / np.where(np.abs(g) < 1e-8, 1.0, g)[None, :])
    ratio = np.log(spread / denom)
    design = np.column_stack([np.ones_like(zp), zp * zp / 2])
    coef, *_ = np.linalg.lstsq(design, ratio, rcond=None)
    return g, np.clip(coef[1], 0.0, 2.0), np.exp(coef[0])


def robust_corr(y):
    """Spearman correlation mapped to the Gaussian scale, ``2 sin(pi r / 6)``."""
    p = y.shape[1]
    if p == 1:
        return np.ones((1, 1))
    rho = stats.spearmanr(y).statistic
    rho = np.array([[1.0, rho], [rho, 1.0]]) if p == 2 else np.asarray(rho)
    r = 2 * np.sin(np.pi * rho / 6)
    np.fill_diagonal(r, 1.0)
    lam, vec = np.linalg.eigh(r)
    if lam[0] < 1e-3:
        r = (vec * np.maximum(lam, 1e-3)) @ vec.T
        d = np.sqrt(np.diag(r))
        r = r / np.outer(d, d)
    return r


def gh_start(y):
    """Starting values: median location, scatter root from quantile scales
    and robust correlation, then g/h heuristics on the de-mixed rows."""
    y = as_sample(y)
    xi = np.median(y, axis=0)
    _, _, a = quantile_gh(y)
    lam, vec = np.linalg.eigh(np.outer(a, a) * robust_corr(y))
    omega = (vec * np.sqrt(lam)) @ vec.T
    omega = 0.5 * (omega + omega.T)
    w = np.linalg.solve(omega, (y - xi).T).T
    g, h, _ = quantile_gh(w)
    return GhParams(xi, omega, g, np.maximum(h, H_START_FLOOR))


def fit_gh(y, g=None, h=None, opts=GH_OPTS):
    """GH MLE by Nelder-Mead.  Passing both ``g`` and ``h`` fixes the shape."""
    y = as_sample(y)
    n, p = y.shape
    k = n_tril(p)
    fixed = g is not None and h is not None
    dim = p + k + (0 if fixed else 2 * p)
    if n <= dim:
        raise EstimationError(f"need more than {dim} observations, got {n}")
    if fixed:
        g = np.broadcast_to(np.asarray(g, dtype=float), (p,)).copy()
        h = np.broadcast_to(np.asarray(h, dtype=float), (p,)).copy()
    center = np.median(y, axis=0)
    yc = y - center
    start = gh_start(yc)
    chol0 = np.linalg.cholesky(start.omega)
    theta0 = [start.xi, tril_pack(chol0)]
    if not fixed:
        theta0 += [start.g, np.log(start.h)]
    theta0 = np.concatenate(theta0)
    cache = {"u": None}

    def unpack(theta):
        c = tril_unpack(theta[p : p + k], p)
        if fixed:
            return theta[:p], c, g, h
        return theta[:p], c, theta[p + k : p + k + p], np.exp(theta[p + k + p :])

    def objective(theta):
        xi, c, gg, hh = unpack(theta)
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(hh)) and np.all(np.isfinite(gg))):
            return np.inf
        om = c @ c.T
        w = np.linalg.solve(om, (yc - xi).T).T
        u = warm_start(w, gg) if cache["u"] is None else cache["u"].copy()
        val = gh_nll_terms(w, gg, hh, u)
        if not np.isfinite(val):
            return np.inf
        cache["u"] = u
        return (2 * n * np.sum(np.log(np.diag(c))) + val) / n

    if not np.isfinite(objective(theta0)):
        raise EstimationError("g-and-h likelihood is not finite at the starting values")
    res = nelder_mead(objective, theta0, opts)
    xi, c, gg, hh = unpack(res.x)
    om = c @ c.T
    notes = []
    om = regularize(om, notes)
    if not res.converged:
        notes.append(f"Nelder-Mead: {res.message}")
    params = GhParams(xi + center, om, gg, hh)
    ll = gh_loglik(params, y)
    return FitResult(params, ll, res.converged, res.iterations, notes)
