"""Generic optimizers shared by the estimators: a Nelder-Mead wrapper and a
root finder for increasing functions."""

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize


class RootBracketError(RuntimeError):
    pass


@dataclass
class OptimizerOpts:
    max_iter: int = 10000
    tol_x: float = 1e-8
    tol_f: float = 1e-10
    initial_step: float = 0.1

    def __post_init__(self):
        if self.max_iter < 1 or self.tol_x <= 0 or self.tol_f <= 0 or self.initial_step <= 0:
            raise ValueError("optimizer tolerances and step must be positive")


@dataclass
class OptimResult:
    x: np.ndarray
    fun: float
    converged: bool
    iterations: int
    evaluations: int
    message: str = ""
    extra: dict = field(default_factory=dict)


def nelder_mead(objective, x0, opts=None):
    """Minimize ``objective`` with the Nelder-Mead simplex method.

    The initial simplex is ``x0`` plus ``initial_step`` along each axis.
    The best vertex is returned even when the iteration cap is hit.
    """
    opts = opts or OptimizerOpts()
    x0 = np.asarray(x0, dtype=float).ravel()
    f0 = objective(x0)
    if not np.isfinite(f0):
        raise ValueError("objective is not finite at the starting point")
    k = x0.size
    simplex = np.vstack([x0, x0 + opts.initial_step * np.eye(k)])

    def wrapped(x):
        v = objective(x)
        return v if np.isfinite(v) else np.inf

    res = optimize.minimize(
        wrapped,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": opts.tol_x,
            "fatol": opts.tol_f,
            "maxiter": opts.max_iter,
            "maxfev": 4 * opts.max_iter,
            "adaptive": k > 4,
        },
    )
    x, fun = res.x, float(res.fun)
    if not fun <= f0:
        x, fun = x0, float(f0)
    return OptimResult(x, fun, bool(res.success), int(res.nit), int(res.nfev), str(res.message))


def find_root_increasing(f, target, tol=1e-10, start=(-1.0, 1.0), max_doublings=200):
    """Solve ``f(z) = target`` for strictly increasing ``f``.

    The bracket is grown geometrically from ``start`` and then refined by
    Brent's method.  Convergence is declared when either the residual is
    below ``tol`` or the bracket is below ``tol`` relative to ``z``.
    """
    lo, hi = float(start[0]), float(start[1])
    with np.errstate(over="ignore", invalid="ignore"):
        flo, fhi = f(lo) - target, f(hi) - target
        n = 0
        while flo > 0:
            hi, fhi = lo, flo
            lo = 2 * lo if lo < 0 else lo - 1.0
            flo = f(lo) - target
            n += 1
            if n > max_doublings or np.isnan(flo):
                raise RootBracketError(f"could not bracket target {target!r} from below")
        n = 0
        while fhi < 0:
            lo, flo = hi, fhi
            hi = 2 * hi if hi > 0 else hi + 1.0
            fhi = f(hi) - target
            n += 1
            if n > max_doublings or np.isnan(fhi):
                raise RootBracketError(f"could not bracket target {target!r} from above")
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if np.isinf(fhi) or np.isinf(flo):
        # brentq cannot interpolate through infinities; bisect them away
        for _ in range(2000):
            mid = 0.5 * (lo + hi)
            with np.errstate(over="ignore", invalid="ignore"):
                fm = f(mid) - target
            if fm == 0:
                return mid
            if fm < 0:
                lo, flo = mid, fm
            else:
                hi, fhi = mid, fm
            if np.isfinite(flo) and np.isfinite(fhi):
                break
    root = optimize.brentq(lambda z: f(z) - target, lo, hi, xtol=tol * 1e-2, rtol=4 * np.finfo(float).eps, maxiter=500)
    return float(root)
