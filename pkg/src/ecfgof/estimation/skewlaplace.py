"""EM fitting of the skew-Laplace law as a Gamma variance-mean mixture.

Given the latent ``W = w`` the observation is ``N_p(xi + w alpha, w Omega)``
and ``W ~ Gamma((p+1)/2, scale 2)``.  The posterior of ``W`` is then
generalized inverse Gaussian with index 1/2, ``chi = Q`` and
``psi = 1 + alpha' Omega^{-1} alpha``, for which

    E[W | x]   = sqrt(Q / psi) + 1 / psi
    E[1/W | x] = sqrt(psi / Q)

The M-step maximizes the expected complete-data log-likelihood jointly in
``(xi, alpha)`` (the stationary point does not involve Omega) and then in
Omega, so each iteration is a full EM step and the likelihood cannot fall.

Plain EM crawls, so by default steps are extrapolated with SQUAREM.  The
likelihood also has a cusp at every data point, and the maximum often
sits on one; EM approaches such a point only sublinearly.  Every few
iterations the fit therefore tries ``xi`` at the closest observation
followed by an M-step with ``xi`` held there.  Extrapolated and jumped
points are kept only when they raise the likelihood, so the recorded
sequence stays monotone.
"""

import numpy as np
from scipy import optimize

from ..distributions import SlParams, sl_logpdf
from ..statistic import as_sample
from .result import EstimationError, FitResult, n_tril, regularize, tril_pack, tril_unpack

EM_TOL = 1e-8
EM_MAX_ITER = 2000
# Q is a Mahalanobis norm, so an absolute floor is affine invariant
_Q_FLOOR = 1e-14


def _quad_terms(params, x):
    chol = np.linalg.cholesky(params.omega)
    z = np.linalg.solve(chol, (x - params.xi).T)
    ainv = np.linalg.solve(chol, params.alpha)
    return np.sum(z * z, axis=0), ainv @ ainv


def posterior_moments(params, x):
    """``(E[W | x], E[1/W | x])`` for every row of ``x``."""
    x = as_sample(x)
    q, a = _quad_terms(params, x)
    q = np.maximum(q, _Q_FLOOR)
    psi = 1.0 + a
    return np.sqrt(q / psi) + 1.0 / psi, np.sqrt(psi / q)


def _m_step(x, ew, einv, notes):
    n = x.shape[0]
    xbar = x.mean(axis=0)
    U, V = einv.sum(), ew.sum()
    s_ux = einv @ x
    denom = U - n * n / V
    if denom <= 0:
        # Jensen gives U V >= n^2; equality means all weights agree
        raise EstimationError("degenerate EM weights")
    xi = (s_ux - n * n * xbar / V) / denom
    alpha = n * (xbar - xi) / V
    r = x - xi
    rs = r.sum(axis=0)
    om = (
        (r * einv[:, None]).T @ r
        - np.outer(rs, alpha)
        - np.outer(alpha, rs)
        + V * np.outer(alpha, alpha)
    ) / n
    return xi, regularize(om, notes), alpha


def _m_step_fixed_xi(x, xi, ew, einv, notes):
    n = x.shape[0]
    V = ew.sum()
    r = x - xi
    rs = r.sum(axis=0)
    alpha = rs / V
    om = ((r * einv[:, None]).T @ r - np.outer(rs, alpha) - np.outer(alpha, rs) + V * np.outer(alpha, alpha)) / n
    return xi, regularize(om, notes), alpha


CUSP_EVERY = 10


def em_start(x):
    """Moment start: ``alpha = 0``, ``xi`` the mean, ``Omega`` the covariance over ``p + 1``."""
    p = x.shape[1]
    cov = np.cov(x, rowvar=False, bias=True).reshape(p, p)
    return SlParams(x.mean(axis=0), cov / (p + 1), np.zeros(p))


def _pack(params):
    return np.concatenate([params.xi, params.alpha, params.omega.ravel()])


def _unpack(vec, p):
    """Parameters from a packed vector, or None when Omega is not SPD."""
    om = vec[2 * p :].reshape(p, p)
    om = 0.5 * (om + om.T)
    if not (np.all(np.isfinite(vec)) and np.linalg.eigvalsh(om)[0] > 0):
        return None
    return SlParams(vec[:p], om, vec[p : 2 * p])


def _loglik(params, x):
    try:
        v = float(np.sum(sl_logpdf(params, x)))
    except (ValueError, np.linalg.LinAlgError):
        return -np.inf
    return v if np.isfinite(v) else -np.inf


def fit_sl_em(x, start=None, tol=EM_TOL, max_iter=EM_MAX_ITER, accelerate=True):
    """EM fit; ``trace`` on the result holds the log-likelihood after each step."""
    x = as_sample(x)
    n, p = x.shape
    if n <= p + 2:
        raise EstimationError(f"need more than {p + 2} observations, got {n}")
    center = x.mean(axis=0)
    xc = x - center
    params = em_start(xc) if start is None else SlParams(start.xi - center, start.omega, start.alpha)
    notes = []

    state = {"anchor": None}

    def em(prm):
        ew, einv = posterior_moments(prm, xc)
        if state["anchor"] is None:
            return SlParams(*_m_step(xc, ew, einv, notes))
        return SlParams(*_m_step_fixed_xi(xc, state["anchor"], ew, einv, notes))

    def squarem(prm):
        nxt = em(prm)
        nxt2 = em(nxt)
        best, best_ll = nxt2, _loglik(nxt2, xc)
        r = _pack(nxt) - _pack(prm)
        v = _pack(nxt2) - _pack(nxt) - r
        nv = np.linalg.norm(v)
        if nv > 0:
            step = min(-1.0, -np.linalg.norm(r) / nv)
            trial = _unpack(_pack(prm) - 2 * step * r + step * step * v, p)
            try:
                trial = None if trial is None else em(trial)
            except EstimationError:
                trial = None
            if trial is not None:
                trial_ll = _loglik(trial, xc)
                if trial_ll > best_ll:
                    best, best_ll = trial, trial_ll
        return best, best_ll

    ll = _loglik(params, xc)
    trace = [ll]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        if accelerate:
            nxt, new = squarem(params)
        else:
            nxt = em(params)
            new = _loglik(nxt, xc)
        if accelerate and state["anchor"] is None and it % CUSP_EVERY == 0 and new - ll < 1e-4:
            q, _ = _quad_terms(nxt, xc)
            anchor = xc[int(np.argmin(q))]
            ew, einv = posterior_moments(SlParams(anchor, nxt.omega, nxt.alpha), xc)
            trial = SlParams(*_m_step_fixed_xi(xc, anchor, ew, einv, notes))
            trial_ll = _loglik(trial, xc)
            if trial_ll > new:
                nxt, new = trial, trial_ll
                state["anchor"] = anchor
        if new < ll:
            # an exact EM step cannot lose likelihood; this is roundoff, so stop here
            converged = ll - new <= max(tol, 1e-12 * abs(ll))
            if not converged:
                notes.append("EM step lost likelihood")
            break
        params = nxt
        trace.append(new)
        if new - ll <= tol:
            if state["anchor"] is None:
                ll = new
                converged = True
                break
            # settled on the cusp; release xi if a free step still gains
            state["anchor"] = None
            free = em(params)
            free_ll = _loglik(free, xc)
            if free_ll - new <= tol:
                ll = new
                converged = True
                break
            params, new = free, free_ll
            trace.append(new)
        ll = new
    if not converged and it == max_iter:
        notes.append(f"EM stopped after {max_iter} iterations")
    out = SlParams(params.xi + center, params.omega, params.alpha)
    return FitResult(out, ll, converged, it, sorted(set(notes)), trace)


def fit_sl(x, alpha_star=None, max_iter=EM_MAX_ITER):
    """Skew-Laplace fit by EM.

    With ``alpha_star`` the norm ``|Omega^{-1/2} alpha|`` is held fixed by
    writing ``alpha = L alpha_star d / |d|`` with ``Omega = L L'``, and the
    likelihood is maximized directly from the EM solution.
    """
    res = fit_sl_em(x, max_iter=max_iter)
    if alpha_star is None:
        return res
    x = as_sample(x)
    n, p = x.shape
    center = x.mean(axis=0)
    xc = x - center
    k = n_tril(p)
    chol = np.linalg.cholesky(res.params.omega)
    d0 = np.linalg.solve(chol, res.params.alpha)
    if np.linalg.norm(d0) < 1e-8:
        d0 = np.eye(p)[0]

    def unpack(theta):
        c = tril_unpack(theta[p : p + k], p)
        d = theta[p + k :]
        nd = np.linalg.norm(d)
        if nd == 0:
            d, nd = np.eye(p)[0], 1.0
        return SlParams(theta[:p], c @ c.T, c @ (alpha_star * d / nd))

    def negll(theta):
        try:
            v = -np.sum(sl_logpdf(unpack(theta), xc)) / n
        except (ValueError, np.linalg.LinAlgError):
            return np.inf
        return v if np.isfinite(v) else np.inf

    theta0 = np.concatenate([res.params.xi - center, tril_pack(chol), d0])
    opt = optimize.minimize(negll, theta0, method="BFGS", options={"gtol": 1e-6, "maxiter": 2000})
    fitted = unpack(opt.x)
    notes = list(res.notes)
    om = regularize(fitted.omega, notes)
    converged = bool(opt.success) or bool(np.max(np.abs(opt.jac)) < 1e-4)
    if not converged:
        notes.append(f"constrained BFGS: {opt.message}")
    out = SlParams(fitted.xi + center, om, fitted.alpha)
    ll = float(np.sum(sl_logpdf(out, x)))
    return FitResult(out, ll, converged, res.iterations + int(opt.nit), notes)
