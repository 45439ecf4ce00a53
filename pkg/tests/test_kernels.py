import numpy as np
import pytest

from ecfgof.kernels import GAUSSIAN, KernelSpec, kernel_eval, parse_kernel


def test_examples():
    assert kernel_eval(GAUSSIAN, 0.0) == 1.0
    assert kernel_eval(GAUSSIAN, 2.0) == pytest.approx(np.exp(-1))
    assert kernel_eval(KernelSpec("genlaplace", 1.0), 1.0) == pytest.approx(0.5)


@pytest.mark.parametrize("spec", [GAUSSIAN, KernelSpec("stable", 0.7), KernelSpec("genlaplace", 2.5)])
def test_unit_at_zero_and_decreasing(spec):
    xi = np.linspace(0, 20, 201)
    v = kernel_eval(spec, xi)
    assert v[0] == 1.0
    assert np.all(np.diff(v) < 0)
    assert np.all((v > 0) & (v <= 1))


def test_stable_limit_is_gaussian():
    xi = np.linspace(0, 10, 50)
    # e^{-xi^{b/2}} at b -> 2 approaches e^{-xi}, the Gaussian kernel at 2 xi
    diff = kernel_eval(KernelSpec("stable", 2 - 1e-8), xi) - kernel_eval(GAUSSIAN, 2 * xi)
    assert np.max(np.abs(diff)) <= 1e-6


def test_parse():
    assert parse_kernel("gaussian") == GAUSSIAN
    assert parse_kernel("stable:1.5") == KernelSpec("stable", 1.5)
    assert str(parse_kernel("genlaplace:2")) == "genlaplace:2"
    for bad in ("stable", "stable:2", "genlaplace:0", "cauchy:1"):
        with pytest.raises(ValueError):
            parse_kernel(bad)


def test_negative_argument():
    with pytest.raises(ValueError):
        kernel_eval(GAUSSIAN, -0.1)
