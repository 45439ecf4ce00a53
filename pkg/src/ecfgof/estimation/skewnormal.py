"""Maximum likelihood for the skew-normal and skew-t families.

Both work in the ``eta = omega^{-1} alpha`` parameterization, in which the
skewing factor of the density does not involve Omega.  For the
skew-normal that lets Omega be profiled out in closed form
(``Omega(xi) = (1/n) sum (x - xi)(x - xi)'``), leaving a smooth problem in
``(xi, eta)`` with an analytic gradient.

When a canonical skewness ``alpha_star`` is supplied the fit is
restricted to ``eta' Omega eta = alpha_star^2``: writing ``Omega = L L'``
this is ``eta = L^{-T} alpha_star d / |d|`` for a free direction ``d``.
"""

import numpy as np
from scipy import optimize, special, stats

from ..distributions import SnParams, StParams, sn_logpdf, st_logpdf
from ..statistic import as_sample
from .result import EstimationError, FitResult, n_tril, regularize, tril_pack, tril_unpack

_LOG2PI = np.log(2 * np.pi)
_B = np.sqrt(2 / np.pi)
NU_MAX = 1e6
NU_MIN = 0.05
NU_START = 10.0


def moment_start(x):
    """Method-of-moments starting values ``(xi, Omega, alpha)``.

    Marginal skewness is mapped to ``delta`` through the half-normal mean
    ``sqrt(2/pi) delta`` and clipped so that ``|delta| <= 0.95``.
    """
    n, p = x.shape
    mean = x.mean(axis=0)
    cov = np.cov(x, rowvar=False, bias=True).reshape(p, p)
    s = np.sqrt(np.diag(cov))
    g1 = np.clip(stats.skew(x, axis=0), -0.99, 0.99)
    c = np.sign(g1) * np.cbrt(2 * np.abs(g1) / (4 - np.pi))
    delta = np.clip(c / np.sqrt(1 + c * c) / _B, -0.95, 0.95)
    muz = _B * delta
    omega_s = s / np.sqrt(1 - muz * muz)
    xi = mean - omega_s * muz
    om = cov + np.outer(omega_s * muz, omega_s * muz)
    corr = om / np.outer(np.sqrt(np.diag(om)), np.sqrt(np.diag(om)))
    q = delta @ np.linalg.solve(corr, delta)
    if q >= 0.95**2:
        delta = delta * 0.95 / np.sqrt(q)
        q = 0.95**2
    alpha = np.linalg.solve(corr, delta) / np.sqrt(1 - q)
    return xi, om, alpha


def _check_n(x):
    n, p = x.shape
    if n <= p + 2:
        raise EstimationError(f"need more than {p + 2} observations, got {n}")


def _profile_objective(theta, x, p):
    xi, eta = theta[:p], theta[p:]
    n = x.shape[0]
    r = x - xi
    s = r.T @ r / n
    sign, logdet = np.linalg.slogdet(s)
    if sign <= 0:
        return np.inf, np.zeros_like(theta)
    lin = r @ eta
    lcdf = special.log_ndtr(lin)
    val = 0.5 * logdet - lcdf.mean()
    zeta = np.exp(-0.5 * lin * lin - 0.5 * _LOG2PI - lcdf)
    g_xi = -np.linalg.solve(s, r.mean(axis=0)) + zeta.mean() * eta
    g_eta = -(zeta @ r) / n
    return val, np.concatenate([g_xi, g_eta])


def _sn_from_eta(xi, omega, eta):
    w = np.sqrt(np.diag(omega))
    return SnParams(xi, omega, w * eta)


def _constrained_eta(chol, d, a_star):
    nd = np.linalg.norm(d)
    if nd == 0:
        d = np.eye(chol.shape[0])[0]
        nd = 1.0
    return np.linalg.solve(chol.T, a_star * d / nd)


def _sn_loglik_chol(xi, chol, eta, x):
    p = x.shape[1]
    r = x - xi
    z = np.linalg.solve(chol, r.T)
    logdet = 2 * np.sum(np.log(np.diag(chol)))
    return np.sum(
        np.log(2) - 0.5 * (p * _LOG2PI + logdet) - 0.5 * np.sum(z * z, axis=0) + special.log_ndtr(r @ eta)
    )


def fit_sn(x, alpha_star=None, max_iter=2000):
    """Skew-normal MLE.  With ``alpha_star`` the canonical skewness is held fixed."""
    x = as_sample(x)
    _check_n(x)
    n, p = x.shape
    center = x.mean(axis=0)
    xc = x - center
    notes = []
    xi0, om0, a0 = moment_start(xc)
    eta0 = a0 / np.sqrt(np.diag(om0))
    res = optimize.minimize(
        _profile_objective,
        np.concatenate([xi0, eta0]),
        args=(xc, p),
        jac=True,
        method="BFGS",
        options={"gtol": 1e-7, "maxiter": max_iter},
    )
    xi, eta = res.x[:p], res.x[p:]
    r = xc - xi
    om = regularize(r.T @ r / n, notes)
    converged = bool(res.success)
    iters = int(res.nit)
    if not converged:
        notes.append(f"profile BFGS: {res.message}")
    if alpha_star is not None:
        chol = np.linalg.cholesky(om)
        d0 = chol.T @ eta
        if np.linalg.norm(d0) < 1e-8:
            d0 = np.eye(p)[0]
        k = n_tril(p)

        def negll(theta):
            c = tril_unpack(theta[p : p + k], p)
            e = _constrained_eta(c, theta[p + k :], alpha_star)
            return -_sn_loglik_chol(theta[:p], c, e, xc) / n

        res2 = optimize.minimize(
            negll,
            np.concatenate([xi, tril_pack(chol), d0]),
            method="BFGS",
            options={"gtol": 1e-6, "maxiter": max_iter},
        )
        xi = res2.x[:p]
        chol = tril_unpack(res2.x[p : p + k], p)
        eta = _constrained_eta(chol, res2.x[p + k :], alpha_star)
        om = regularize(chol @ chol.T, notes)
        converged = bool(res2.success) or _small_grad(res2)
        iters += int(res2.nit)
        if not converged:
            notes.append(f"constrained BFGS: {res2.message}")
    if not np.all(np.isfinite(eta)) or not np.all(np.isfinite(xi)):
        raise EstimationError("skew-normal fit diverged")
    params = _sn_from_eta(xi + center, om, eta)
    ll = float(np.sum(sn_logpdf(params, x)))
    return FitResult(params, ll, converged, iters, notes)


def _small_grad(res, tol=1e-4):
    jac = getattr(res, "jac", None)
    return jac is not None and np.all(np.isfinite(jac)) and np.max(np.abs(jac)) < tol


def _st_loglik(xi, chol, eta, nu, x):
    n, p = x.shape
    r = x - xi
    z = np.linalg.solve(chol, r.T)
    quad = np.sum(z * z, axis=0)
    logdet = 2 * np.sum(np.log(np.diag(chol)))
    logt = (
        special.gammaln((nu + p) / 2)
        - special.gammaln(nu / 2)
        - 0.5 * p * np.log(nu * np.pi)
        - 0.5 * logdet
        - 0.5 * (nu + p) * np.log1p(quad / nu)
    )
    arg = (r @ eta) * np.sqrt((nu + p) / (quad + nu))
    cdf = special.stdtr(nu + p, arg)
    with np.errstate(divide="ignore"):
        lcdf = np.log(cdf)
    tiny = cdf < 1e-300
    if np.any(tiny):
        lcdf[tiny] = stats.t.logsf(-arg[tiny], nu + p)
    return np.sum(np.log(2) + logt + lcdf)


def fit_st(x, alpha_star=None, nu=None, max_iter=3000):
    """Skew-t MLE over ``(xi, chol(Omega), eta, log nu)``.

    ``nu`` is capped at 1e6 (beyond that the law is numerically the
    skew-normal).  Passing ``alpha_star`` and ``nu`` fixes the canonical
    shape for simple-null fitting.
    """
    x = as_sample(x)
    _check_n(x)
    n, p = x.shape
    center = x.mean(axis=0)
    xc = x - center
    notes = []
    sn = fit_sn(xc, alpha_star=alpha_star)
    k = n_tril(p)
    fixed_shape = alpha_star is not None

    def unpack(theta):
        xi = theta[:p]
        c = tril_unpack(theta[p : p + k], p)
        if fixed_shape:
            e = _constrained_eta(c, theta[p + k : p + k + p], alpha_star)
        else:
            e = theta[p + k : p + k + p]
        v = float(nu) if nu is not None else float(np.exp(theta[-1]))
        return xi, c, e, v

    def negll(theta):
        xi, c, e, v = unpack(theta)
        val = _st_loglik(xi, c, e, v, xc)
        return -val / n if np.isfinite(val) else np.inf

    def start(nu0):
        # shrink Omega so the t scatter roughly matches the SN covariance
        scale = (nu0 - 2) / nu0 if nu0 > 2.5 else 0.5
        chol0 = np.linalg.cholesky(sn.params.omega * scale)
        eta0 = sn.params.alpha / sn.params.scales / np.sqrt(scale)
        third = chol0.T @ eta0 if fixed_shape else eta0
        if fixed_shape and np.linalg.norm(third) < 1e-8:
            third = np.eye(p)[0]
        theta0 = [sn.params.xi, tril_pack(chol0), third]
        if nu is None:
            theta0.append([np.log(nu0)])
        return np.concatenate(theta0)

    bounds = [(None, None)] * (p + k + p)
    if nu is None:
        bounds.append((np.log(NU_MIN), np.log(NU_MAX)))
    # the likelihood is flat in large nu, so a second start at the
    # skew-normal fit (nu at the cap) guards against stopping on the ridge
    starts = [NU_START, NU_MAX] if nu is None else [float(nu)]
    opts = {"maxiter": max_iter, "ftol": 1e-13, "gtol": 1e-9}
    res = None
    for nu0 in starts:
        cand = optimize.minimize(negll, start(nu0), method="L-BFGS-B", bounds=bounds, options=opts)
        if res is None or cand.fun < res.fun:
            res = cand
    xi, c, e, v = unpack(res.x)
    if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(e))):
        raise EstimationError("skew-t fit diverged")
    om = regularize(c @ c.T, notes)
    converged = bool(res.success)
    if not converged:
        notes.append(f"L-BFGS-B: {res.message}")
    if v >= NU_MAX * 0.999:
        notes.append("degrees of freedom at the cap; the fit is effectively skew-normal")
    w = np.sqrt(np.diag(om))
    params = StParams(xi + center, om, w * e, v)
    ll = float(np.sum(st_logpdf(params, x)))
    return FitResult(params, ll, converged, int(res.nit) + sn.iterations, notes)
