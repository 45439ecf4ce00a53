"""The two-sample ECF statistic and its Monte Carlo integration oracle.

The statistic is

    T = 1/n^2 sum_jk Psi(|X_j - X_k|^2) + 1/m^2 sum_jk Psi(|Y_j - Y_k|^2)
        - 2/(nm) sum_jk Psi(|X_j - Y_k|^2).

Kernel values lie in (0, 1], so each one is rounded to a multiple of
2**-42 and the three double sums are accumulated exactly as integers.
The result is therefore independent of row order, block layout and the
number of worker threads; the rounding contributes at most 2**-43 per
term.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .kernels import GAUSSIAN, KernelSpec

_SCALE_BITS = 42
_SCALE = float(1 << _SCALE_BITS)
BLOCK_ROWS = 1024


@dataclass(frozen=True)
class StatValue:
    value: float
    n: int
    m: int
    kernel: KernelSpec = GAUSSIAN

    def __float__(self):
        return self.value


def as_sample(x, name="sample"):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty n x p array")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} has non-finite entries")
    return x


def ecf(x, t):
    """Empirical characteristic function ``(1/n) sum_j exp(i t'X_j)``."""
    x = as_sample(x)
    t = np.asarray(t, dtype=float)
    single = t.ndim == 1
    t = np.atleast_2d(t)
    if t.shape[1] != x.shape[1]:
        raise ValueError("t and the sample differ in dimension")
    arg = x @ t.T
    out = np.cos(arg).mean(axis=0) + 1j * np.sin(arg).mean(axis=0)
    return out[0] if single else out


def _psi(kernel, d2):
    if kernel.variant == "gaussian":
        return np.exp(-0.5 * d2)
    if kernel.variant == "stable":
        return np.exp(-(d2 ** (kernel.b / 2)))
    return (1.0 + d2) ** (-kernel.b)


def _qsum(values):
    return int(np.rint(values * _SCALE).astype(np.int64).sum())


def _blocks(n, size):
    return [(i, min(i + size, n)) for i in range(0, n, size)]


def _within(x, kernel, pool, size):
    """Quantized sum of Psi over all ordered pairs (j, k), diagonal included."""
    n = x.shape[0]
    tasks = []
    bl = _blocks(n, size)
    for a, (i0, i1) in enumerate(bl):
        tasks.append(lambda i0=i0, i1=i1: _qsum(_psi(kernel, pdist(x[i0:i1], "sqeuclidean"))))
        for j0, j1 in bl[a + 1 :]:
            tasks.append(lambda i0=i0, i1=i1, j0=j0, j1=j1: _qsum(_psi(kernel, cdist(x[i0:i1], x[j0:j1], "sqeuclidean"))))
    off = sum(_run(tasks, pool))
    return 2 * off + n * (1 << _SCALE_BITS)


def _cross(x, y, kernel, pool, size):
    tasks = [
        (lambda i0=i0, i1=i1, j0=j0, j1=j1: _qsum(_psi(kernel, cdist(x[i0:i1], y[j0:j1], "sqeuclidean"))))
        for i0, i1 in _blocks(x.shape[0], size)
        for j0, j1 in _blocks(y.shape[0], size)
    ]
    return sum(_run(tasks, pool))


def _run(tasks, pool):
    if pool is None:
        return [t() for t in tasks]
    return list(pool.map(lambda t: t(), tasks))


def t_stat(x, x0, kernel=GAUSSIAN, threads=1, block_rows=BLOCK_ROWS):
    """Weighted L2 distance between the empirical CFs of ``x`` and ``x0``."""
    x = as_sample(x, "x")
    x0 = as_sample(x0, "x0")
    if x.shape[1] != x0.shape[1]:
        raise ValueError("samples differ in dimension")
    n, m = x.shape[0], x0.shape[0]
    # a full block of 2**42-scaled terms must fit in int64
    block_rows = max(1, min(int(block_rows), 1400))
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        sxx = _within(x, kernel, pool, block_rows)
        syy = _within(x0, kernel, pool, block_rows)
        sxy = _cross(x, x0, kernel, pool, block_rows)
    finally:
        if pool is not None:
            pool.shutdown()
    exact = Fraction(sxx, n * n) + Fraction(syy, m * m) - Fraction(2 * sxy, n * m)
    return StatValue(float(exact / (1 << _SCALE_BITS)), n, m, kernel)


def mc_oracle(x, x0, kernel, draws, stream, chunk=20000):
    """Estimate the weighted L2 integral by sampling the weight density.

    Only the Gaussian kernel is supported, whose weight law is N_p(0, I).
    Returns ``(estimate, standard_error)``.
    """
    if kernel.variant != "gaussian":
        raise ValueError("the integration oracle supports only the Gaussian kernel")
    x = as_sample(x, "x")
    x0 = as_sample(x0, "x0")
    p = x.shape[1]
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < draws:
        k = min(chunk, draws - done)
        w = stream.standard_normal((k, p))
        a = x @ w.T
        b = x0 @ w.T
        re = np.cos(a).mean(axis=0) - np.cos(b).mean(axis=0)
        im = np.sin(a).mean(axis=0) - np.sin(b).mean(axis=0)
        vals = re * re + im * im
        total += vals.sum()
        total_sq += (vals * vals).sum()
        done += k
    mean = total / draws
    var = max(total_sq / draws - mean * mean, 0.0)
    return mean, float(np.sqrt(var / max(draws - 1, 1)))
