"""Compiled inner loop of the g-and-h likelihood used by the optimizer.

Each coordinate is inverted by Newton's method on ``asinh(tau(z))``
inside a shrinking bracket, warm-started from the previous evaluation.
The pure numpy path in :mod:`ecfgof.distributions.tukey` computes the same
quantities and serves as the cross-check.
"""

import math

import numpy as np
from numba import njit

_LOG2 = math.log(2.0)
_HALF_LOG2PI = 0.5 * math.log(2 * math.pi)
G_ZERO = 1e-8


@njit(cache=True)
def _log_lin_and_a(g, h, z):
    """``log|lin(z)|`` and ``log(exp(g z) + h z lin(z))``, where
    ``lin = (exp(g z) - 1)/g`` (or ``z`` when g is negligible)."""
    if abs(g) < G_ZERO:
        return math.log(abs(z)) if z != 0.0 else -math.inf, math.log(1.0 + h * z * z)
    gz = g * z
    if gz > 30.0:
        q = -math.expm1(-gz)
        return gz + math.log(q) - math.log(abs(g)), gz + math.log(1.0 + h * z * q / g)
    lin = math.expm1(gz) / g
    la = math.log(abs(lin)) if lin != 0.0 else -math.inf
    return la, math.log(math.exp(gz) + h * z * lin)


@njit(cache=True)
def _invert(g, h, y, z):
    target = math.asinh(y)
    lo = -math.inf
    hi = math.inf
    for _ in range(300):
        loglin, loga = _log_lin_and_a(g, h, z)
        hz = 0.5 * h * z * z
        logt = hz + loglin
        sgn = 1.0 if z > 0 else (-1.0 if z < 0 else 0.0)
        if logt > 300.0:
            f = sgn * (logt + _LOG2) - target
            loghyp = logt
        else:
            t = sgn * math.exp(logt)
            f = math.asinh(t) - target
            loghyp = 0.5 * math.log1p(t * t)
        if f == 0.0:
            return z
        if f < 0.0:
            lo = z
        else:
            hi = z
        zn = z - f * math.exp(loghyp - hz - loga)
        if not (zn >= lo and zn <= hi):
            if lo > -math.inf and hi < math.inf:
                zn = 0.5 * (lo + hi)
            elif lo > -math.inf:
                zn = lo + max(1.0, abs(lo))
            else:
                zn = hi - max(1.0, abs(hi))
        if abs(zn - z) <= 1e-13 * (1.0 + abs(z)) or hi - lo <= 1e-15 * (1.0 + abs(z)):
            return zn
        z = zn
    return math.nan


@njit(cache=True)
def gh_nll_terms(w, g, h, u):
    """Sum over entries of ``-log phi(u) + log tau'(u)`` with ``u = tau^{-1}(w)``.

    ``u`` holds warm starts on entry and the solutions on exit.  Returns
    ``inf`` when an entry cannot be inverted.
    """
    n, p = w.shape
    total = 0.0
    for i in range(n):
        for j in range(p):
            gj, hj, y = g[j], h[j], w[i, j]
            z0 = u[i, j]
            if not math.isfinite(z0):
                z0 = 0.0
            if hj == 0.0 and abs(gj) >= G_ZERO and 1.0 + gj * y <= 0.0:
                return math.inf
            z = _invert(gj, hj, y, z0)
            if not math.isfinite(z):
                return math.inf
            u[i, j] = z
            _, loga = _log_lin_and_a(gj, hj, z)
            total += 0.5 * z * z + _HALF_LOG2PI + 0.5 * hj * z * z + loga
    return total


def warm_start(w, g):
    """``log(1 + g w)/g`` where defined, else ``w``: the h = 0 inverse."""
    arg = 1 + g * w
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.log(np.where(arg > 0, arg, 1.0)) / np.where(np.abs(g) < G_ZERO, 1.0, g)
    return np.where((np.abs(g) < G_ZERO) | (arg <= 0) | ~np.isfinite(z), w, z)
