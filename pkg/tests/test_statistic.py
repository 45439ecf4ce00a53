import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ecfgof.kernels import GAUSSIAN, KernelSpec
from ecfgof.rng import SeedSpec
from ecfgof.statistic import ecf, mc_oracle, t_stat

from conftest import rng_for

HAND = 2 * (1 - np.exp(-0.5))


def test_ecf_at_zero_and_single_point():
    x = rng_for(1).standard_normal((7, 2))
    assert ecf(x, [0.0, 0.0]) == 1
    t = np.array([0.3, -1.1])
    v = ecf(x[:1], t)
    assert v == pytest.approx(np.exp(1j * t @ x[0]))
    assert abs(v) == pytest.approx(1.0)


def test_ecf_gaussian():
    x = rng_for(2).standard_normal((10**5, 2))
    assert abs(ecf(x, [1.0, 0.0]) - np.exp(-0.5)) < 0.01


def test_ecf_dimension_mismatch():
    with pytest.raises(ValueError):
        ecf(np.zeros((3, 2)), [1.0, 2.0, 3.0])


def test_identical_samples_zero():
    x = rng_for(3).standard_normal((40, 3))
    assert abs(t_stat(x, x).value) <= 1e-12


def test_hand_case():
    assert t_stat([[0.0]], [[1.0]]).value == pytest.approx(HAND, abs=1e-12)


def test_errors():
    with pytest.raises(ValueError):
        t_stat(np.zeros((3, 2)), np.zeros((3, 1)))
    with pytest.raises(ValueError):
        t_stat(np.zeros((0, 2)), np.zeros((3, 2)))
    with pytest.raises(ValueError):
        t_stat([[np.nan]], [[0.0]])


def test_brute_force_agreement():
    s = rng_for(4)
    x, y = s.standard_normal((13, 2)), s.standard_normal((9, 2)) + 0.5
    for kernel in (GAUSSIAN, KernelSpec("stable", 1.2), KernelSpec("genlaplace", 0.8)):

        def mean_psi(a, b):
            d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(-1)
            return kernel(d2).mean()

        ref = mean_psi(x, x) + mean_psi(y, y) - 2 * mean_psi(x, y)
        assert t_stat(x, y, kernel).value == pytest.approx(ref, abs=1e-12)


def test_block_and_thread_layout_bit_stable():
    s = rng_for(5)
    x, y = s.standard_normal((150, 2)), s.standard_normal((90, 2))
    ref = t_stat(x, y).value
    assert t_stat(x, y, block_rows=17).value == ref
    assert t_stat(x, y, threads=3, block_rows=32).value == ref


def test_permutation_bit_identical():
    s = rng_for(6)
    x, y = s.standard_normal((60, 3)), s.standard_normal((45, 3))
    ref = t_stat(x, y).value
    assert t_stat(x[s.permutation(60)], y[s.permutation(45)]).value == ref


def test_swap_symmetry_exact():
    s = rng_for(7)
    x, y = s.standard_normal((31, 2)), 2 * s.standard_normal((17, 2))
    assert t_stat(x, y).value == t_stat(y, x).value


def test_translation_and_rotation_invariance():
    s = rng_for(8)
    x, y = s.standard_normal((50, 3)), s.standard_normal((40, 3)) + 0.3
    ref = t_stat(x, y).value
    c = s.standard_normal(3) * 5
    assert abs(t_stat(x + c, y + c).value - ref) <= 1e-12
    q, _ = np.linalg.qr(s.standard_normal((3, 3)))
    assert abs(t_stat(x @ q, y @ q).value - ref) <= 1e-10


def test_mc_oracle_identical_is_zero():
    x = rng_for(9).standard_normal((10, 2))
    est, se = mc_oracle(x, x, GAUSSIAN, 1000, rng_for(10))
    assert est == 0 and se == 0


def test_mc_oracle_hand_case():
    est, se = mc_oracle([[0.0]], [[1.0]], GAUSSIAN, 10**5, rng_for(11))
    assert abs(est - HAND) <= 4 * se


def test_mc_oracle_se_rate():
    s = rng_for(12)
    x, y = s.standard_normal((20, 2)), s.standard_normal((20, 2)) + 1
    _, se1 = mc_oracle(x, y, GAUSSIAN, 20_000, rng_for(13))
    _, se4 = mc_oracle(x, y, GAUSSIAN, 80_000, rng_for(14))
    assert se4 / se1 == pytest.approx(0.5, rel=0.2)


def test_mc_oracle_rejects_other_kernels():
    with pytest.raises(ValueError):
        mc_oracle([[0.0]], [[1.0]], KernelSpec("stable", 1.0), 10, rng_for(15))


def test_random_instance_against_oracle():
    s = rng_for(16)
    x, y = s.standard_normal((50, 2)), 1.3 * s.standard_normal((50, 2)) + 0.2
    est, se = mc_oracle(x, y, GAUSSIAN, 10**6, SeedSpec(3).stream())
    assert abs(t_stat(x, y).value - est) <= 4 * se


samples = arrays(np.float64, st.tuples(st.integers(1, 12), st.just(2)), elements=st.floats(-50, 50))


@settings(max_examples=60, deadline=None)
@given(samples, samples)
def test_property_nonnegative_and_symmetric(x, y):
    v = t_stat(x, y).value
    assert v >= -1e-12
    assert v == t_stat(y, x).value
