"""Kernels Psi defining the weight measure of the L2 distance.

Each kernel is the characteristic function of a spherical weight law
written as a function of the squared norm, so the weighted distance
between two empirical CFs reduces to pairwise kernel sums.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KernelSpec:
    variant: str = "gaussian"
    b: float = 0.0

    def __post_init__(self):
        if self.variant == "gaussian":
            return
        if self.variant == "stable":
            if not 0 < self.b < 2:
                raise ValueError("stable-index kernel needs b in (0, 2)")
        elif self.variant == "genlaplace":
            if not self.b > 0:
                raise ValueError("generalized Laplace kernel needs b > 0")
        else:
            raise ValueError(f"unknown kernel variant {self.variant!r}")

    def __str__(self):
        return "gaussian" if self.variant == "gaussian" else f"{self.variant}:{self.b:g}"

    def __call__(self, xi):
        return kernel_eval(self, xi)


GAUSSIAN = KernelSpec()


def parse_kernel(text):
    """Parse ``gaussian``, ``stable:<b>`` or ``genlaplace:<b>``."""
    text = text.strip().lower()
    if text == "gaussian":
        return GAUSSIAN
    name, sep, arg = text.partition(":")
    if not sep:
        raise ValueError(f"kernel {text!r} needs a parameter, e.g. {text}:1.0")
    return KernelSpec(name, float(arg))


def kernel_eval(spec, xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise ValueError("kernel argument must be non-negative")
    if spec.variant == "gaussian":
        return np.exp(-0.5 * xi)
    if spec.variant == "stable":
        return np.exp(-(xi ** (spec.b / 2)))
    return (1.0 + xi) ** (-spec.b)
