"""Reproducible random streams and the base univariate samplers.

Streams are addressed by ``(master_seed, path)``.  The path is fed to
:class:`numpy.random.SeedSequence` as its spawn key and drives a Philox
counter-based generator, so replication ``r`` of a study can be created
directly on any worker without replaying earlier draws.
"""

from dataclasses import dataclass, field

import numpy as np

GENERATOR_ID = "numpy.random.Philox(SeedSequence(master_seed, spawn_key=path))"

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    path: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not 0 <= int(self.master_seed) <= _U64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        for idx in self.path:
            if not 0 <= int(idx) <= _U64:
                raise ValueError("path entries must be 64-bit unsigned integers")
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "path", tuple(int(i) for i in self.path))

    def child(self, *indices):
        return SeedSpec(self.master_seed, self.path + tuple(indices))

    def stream(self):
        return make_stream(self)


def make_stream(seed):
    """Create a fresh generator for a :class:`SeedSpec` (or a bare int)."""
    if not isinstance(seed, SeedSpec):
        seed = SeedSpec(int(seed))
    ss = np.random.SeedSequence(seed.master_seed, spawn_key=seed.path)
    return np.random.Generator(np.random.Philox(ss))


def std_normal(stream, n):
    return stream.standard_normal(n)


def gamma(stream, shape, scale, size=None):
    if not (shape > 0 and scale > 0):
        raise ValueError("gamma shape and scale must be positive")
    return stream.gamma(shape, scale, size)


def inverse_gamma(stream, shape, scale, size=None):
    """Inverse-gamma draws: reciprocal of Gamma(shape, 1/scale)."""
    if not (shape > 0 and scale > 0):
        raise ValueError("inverse-gamma shape and scale must be positive")
    return 1.0 / stream.gamma(shape, 1.0 / scale, size)


def inverse_gamma_mean(shape, scale):
    """Mean of IG(shape, scale), or ``inf`` when it does not exist (shape <= 1)."""
    if shape <= 1:
        return np.inf
    return scale / (shape - 1.0)


def _check_stable(alpha, beta, scale):
    if not 0 < alpha <= 2:
        raise ValueError("stability index must lie in (0, 2]")
    if not -1 <= beta <= 1:
        raise ValueError("skewness must lie in [-1, 1]")
    if not scale > 0:
        raise ValueError("scale must be positive")


def univariate_stable(stream, alpha, beta=0.0, scale=1.0, loc=0.0, size=None):
    """Chambers-Mallows-Stuck draws from the 1-parameterization S_alpha(scale, beta, loc).

    The characteristic function is
    ``exp(-scale^a |t|^a (1 - i beta sign(t) tan(pi a / 2)) + i loc t)`` for
    ``a != 1`` and ``exp(-scale |t| (1 + i beta (2/pi) sign(t) log|t|) + i loc t)``
    for ``a == 1``.  At ``a == 2`` this is N(loc, 2 scale^2).
    """
    _check_stable(alpha, beta, scale)
    v = stream.uniform(-np.pi / 2, np.pi / 2, size)
    w = stream.standard_exponential(size)
    if alpha == 1.0:
        half = np.pi / 2 + beta * v
        x = (2 / np.pi) * (half * np.tan(v) - beta * np.log((np.pi / 2) * w * np.cos(v) / half))
        return scale * x + (2 / np.pi) * beta * scale * np.log(scale) + loc
    zeta = beta * np.tan(np.pi * alpha / 2)
    b = np.arctan(zeta) / alpha
    s = (1 + zeta**2) ** (1 / (2 * alpha))
    x = (
        s
        * np.sin(alpha * (v + b))
        / np.cos(v) ** (1 / alpha)
        * (np.cos(v - alpha * (v + b)) / w) ** ((1 - alpha) / alpha)
    )
    return scale * x + loc


def stable_cf(t, alpha, beta=0.0, scale=1.0, loc=0.0):
    """Characteristic function matching :func:`univariate_stable`."""
    t = np.asarray(t, dtype=float)
    at = np.abs(scale * t)
    if alpha == 1.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            logt = np.where(t == 0, 0.0, np.log(np.abs(t)))
        expo = -at * (1 + 1j * beta * (2 / np.pi) * np.sign(t) * logt)
    else:
        expo = -(at**alpha) * (1 - 1j * beta * np.sign(t) * np.tan(np.pi * alpha / 2))
    return np.exp(expo + 1j * loc * t)
