"""Tukey g-and-h transform and sampler, plus the sinh-arcsinh alternative."""

import numpy as np

from ..optim import find_root_increasing
from .params import GhParams, SasParams

# |g| below this routes to the g = 0 branch
G_ZERO = 1e-8
_LOG2 = np.log(2.0)


def _branches(g, z):
    g = np.asarray(g, dtype=float)
    z = np.asarray(z, dtype=float)
    small = np.abs(g) < G_ZERO
    safe_g = np.where(small, 1.0, g)
    with np.errstate(over="ignore", invalid="ignore"):
        lin = np.where(small, z, np.expm1(safe_g * z) / safe_g)
    return small, safe_g, lin


def tau_gh(g, h, z):
    """``((exp(g z) - 1) / g) exp(h z^2 / 2)``; ``z exp(h z^2 / 2)`` when g = 0."""
    _, _, lin = _branches(g, z)
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        return lin * np.exp(np.asarray(h, dtype=float) * z * z / 2)


def tau_gh_prime(g, h, z):
    return np.exp(tau_gh_log_prime(g, h, z))


def tau_gh_log_prime(g, h, z):
    """log of the derivative of :func:`tau_gh` with respect to ``z``.

    The derivative is ``exp(h z^2/2) (exp(g z) + h z (exp(g z) - 1)/g)``,
    both summands non-negative for h >= 0.
    """
    small, safe_g, lin = _branches(g, z)
    z = np.asarray(z, dtype=float)
    h = np.asarray(h, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        egz = np.where(small, 1.0, np.exp(safe_g * z))
        return h * z * z / 2 + np.log(egz + h * z * lin)


def tau_gh_inv(g, h, y, tol=1e-12):
    """Scalar inverse of :func:`tau_gh` by bracketing plus Brent."""
    g, h, y = float(g), float(h), float(y)
    return find_root_increasing(lambda z: float(tau_gh(g, h, z)), y, tol=tol)


def tau_gh_inv_array(g, h, y, z0=None, max_iter=60):
    """Vectorized inverse of :func:`tau_gh` (broadcasting ``g``, ``h``, ``y``).

    Newton's method on ``asinh(tau(z)) = asinh(y)``, which tames the
    ``exp(h z^2/2)`` growth, with an optional warm start ``z0``.  Entries
    that fail to settle are redone by :func:`_inv_bracketed`.  Entries with
    no root (possible only when h = 0 and ``y`` lies beyond the ``-1/g``
    asymptote) come back as NaN.
    """
    g, h, y = np.broadcast_arrays(
        np.asarray(g, dtype=float), np.asarray(h, dtype=float), np.asarray(y, dtype=float)
    )
    shape = y.shape
    g, h, y = g.ravel(), h.ravel(), y.ravel()
    small = np.abs(g) < G_ZERO
    any_small = small.any()
    gsafe = np.where(small, 1.0, g) if any_small else g
    if z0 is None:
        arg = 1 + g * y
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.log(np.where(arg > 0, arg, 1.0)) / gsafe
        z = np.where(small | ~(arg > 0) | ~np.isfinite(z), y, z)
        z = np.where(np.isfinite(z), z, 0.0)
    else:
        z = np.broadcast_to(np.asarray(z0, dtype=float), shape).ravel().copy()
    target = np.arcsinh(y)
    half_h = 0.5 * h
    lo = np.full(y.shape, -np.inf)
    hi = np.full(y.shape, np.inf)
    done = False
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for _ in range(max_iter):
            gz = g * z
            egz = np.exp(gz)
            lin = np.expm1(gz) / gsafe
            if any_small:
                lin = np.where(small, z, lin)
                egz = np.where(small, 1.0, egz)
            # asinh(tau) and its derivative tau' / sqrt(1 + tau^2), in logs
            la = half_h * z * z
            logt = la + np.log(np.abs(lin))
            big = logt > 300
            sgn = np.sign(lin)
            t = sgn * np.exp(np.minimum(logt, 300))
            f = np.where(big, sgn * (logt + _LOG2), np.arcsinh(t)) - target
            lo = np.where(f < 0, z, lo)
            hi = np.where(f > 0, z, hi)
            logd = la + np.log(egz + h * z * lin) - np.where(big, logt, 0.5 * np.log1p(t * t))
            deriv = np.exp(logd)
            zn = z - f / deriv
            bad = (zn < lo) | (zn > hi) | np.isnan(zn)
            if bad.any():
                mid = 0.5 * (lo + hi)
                widen = np.where(np.isfinite(lo), lo + np.maximum(1.0, np.abs(lo)), hi - np.maximum(1.0, np.abs(hi)))
                zn = np.where(bad, np.where(np.isfinite(mid), mid, widen), zn)
            # quadratic convergence: a 1e-9 step leaves an error far below it
            conv = np.abs(zn - z) <= 1e-9 * (1 + np.abs(z))
            z = np.where(f == 0, z, zn)
            if np.all(conv | (f == 0)):
                done = True
                break
    redo = ~np.isfinite(z)
    if not done:
        with np.errstate(over="ignore", invalid="ignore"):
            redo |= ~(np.abs(tau_gh(g, h, z) - y) <= 1e-10 * (1 + np.abs(y)))
    inf = np.isinf(y)
    redo &= ~inf
    if redo.any():
        z[redo] = _inv_bracketed(g[redo], h[redo], y[redo])
    z[inf] = y[inf]
    return z.reshape(shape)


def _inv_bracketed(g, h, y, max_iter=200):
    """Slow but sure inverse: geometric bracket, then safeguarded Newton."""
    g, h, y = np.broadcast_arrays(
        np.asarray(g, dtype=float), np.asarray(h, dtype=float), np.asarray(y, dtype=float)
    )
    shape = y.shape
    g, h, y = g.ravel().copy(), h.ravel().copy(), y.ravel().copy()
    lo = np.full(y.shape, -1.0)
    hi = np.full(y.shape, 1.0)
    ok = np.isfinite(y)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(200):
            bad = ok & ~(tau_gh(g, h, lo) <= y)
            if not bad.any():
                break
            hi[bad] = lo[bad]
            lo[bad] *= 2
        ok &= tau_gh(g, h, lo) <= y
        for _ in range(200):
            bad = ok & ~(tau_gh(g, h, hi) >= y)
            if not bad.any():
                break
            lo[bad] = hi[bad]
            hi[bad] *= 2
        ok &= tau_gh(g, h, hi) >= y

        # start from the inverse of the h = 0 map, clipped into the bracket
        z = np.clip(y, lo, hi)
        gs = np.abs(g) >= G_ZERO
        arg = 1 + g * y
        z0 = np.where(gs & (arg > 0), np.log(np.where(arg > 0, arg, 1.0)) / np.where(gs, g, 1.0), y)
        z = np.where((z0 > lo) & (z0 < hi), z0, 0.5 * (lo + hi))
        active = ok.copy()
        for _ in range(max_iter):
            if not active.any():
                break
            za = z[active]
            ga, ha, ya = g[active], h[active], y[active]
            f = tau_gh(ga, ha, za) - ya
            lo_a, hi_a = lo[active], hi[active]
            lo_a = np.where(f < 0, za, lo_a)
            hi_a = np.where(f > 0, za, hi_a)
            dfz = np.exp(tau_gh_log_prime(ga, ha, za))
            step = f / dfz
            zn = za - step
            outside = ~((zn > lo_a) & (zn < hi_a)) | ~np.isfinite(zn)
            zn = np.where(outside, 0.5 * (lo_a + hi_a), zn)
            done = (f == 0) | (np.abs(zn - za) <= 1e-14 * (1 + np.abs(za))) | (hi_a - lo_a <= 1e-14 * (1 + np.abs(za)))
            z[active] = np.where(f == 0, za, zn)
            lo[active], hi[active] = lo_a, hi_a
            idx = np.flatnonzero(active)
            active[idx[done]] = False
    z[~ok] = np.nan
    return z.reshape(shape)


def sample_gh(params, n, stream):
    z = stream.standard_normal((n, params.dim))
    return tau_gh(params.g, params.h, z) @ params.omega.T + params.xi


def sinh_arcsinh(a, b, z):
    """``S_{a,b}(z) = sinh(b asinh(z) - a)``."""
    return np.sinh(b * np.arcsinh(z) - a)


def sample_sas(params, n, stream):
    z = stream.standard_normal((n, params.dim))
    return sinh_arcsinh(-params.e / params.f, 1.0 / params.f, z)
