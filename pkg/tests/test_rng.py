import numpy as np
import pytest

from ecfgof.rng import (
    GENERATOR_ID,
    SeedSpec,
    gamma,
    inverse_gamma,
    inverse_gamma_mean,
    make_stream,
    stable_cf,
    std_normal,
    univariate_stable,
)

N = 10**6


def test_same_path_same_draws():
    a = SeedSpec(5, (1, 2)).stream().standard_normal(10)
    b = make_stream(SeedSpec(5).child(1, 2)).standard_normal(10)
    assert np.array_equal(a, b)


def test_sibling_paths_differ():
    a = SeedSpec(5, (1,)).stream().standard_normal(5)
    b = SeedSpec(5, (2,)).stream().standard_normal(5)
    assert not np.array_equal(a, b)


def test_generator_is_philox():
    assert isinstance(SeedSpec(1).stream().bit_generator, np.random.Philox)
    assert "Philox" in GENERATOR_ID


def test_seed_range():
    with pytest.raises(ValueError):
        SeedSpec(-1)
    with pytest.raises(ValueError):
        SeedSpec(1, (2**64,))


def test_normal_moments(stream):
    z = std_normal(stream, N)
    assert abs(z.mean()) < 5 / np.sqrt(N)
    assert abs(z.var() - 1) < 5 * np.sqrt(2 / N)


def test_gamma_means(stream):
    for shape, scale in [(0.5, 2.0), (3.0, 0.5)]:
        g = gamma(stream, shape, scale, N)
        assert abs(g.mean() - shape * scale) < 5 * np.sqrt(shape) * scale / np.sqrt(N)


def test_inverse_gamma_mean(stream):
    draws = inverse_gamma(stream, 4.0, 5.0, N)
    assert inverse_gamma_mean(4.0, 5.0) == pytest.approx(5 / 3)
    assert draws.mean() == pytest.approx(5 / 3, rel=0.01)
    assert inverse_gamma_mean(1.0, 1.0) == np.inf


def test_invalid_shape(stream):
    with pytest.raises(ValueError):
        gamma(stream, 0.0, 1.0)
    with pytest.raises(ValueError):
        univariate_stable(stream, 2.5)


def test_stable_two_is_gaussian_variance_two(stream):
    x = univariate_stable(stream, 2.0, size=N)
    assert x.var() == pytest.approx(2.0, rel=0.01)


@pytest.mark.parametrize("alpha,beta", [(1.5, 0.0), (1.5, 1.0), (1.0, 0.5), (0.7, -0.8)])
def test_stable_cf_matches_sampler(stream, alpha, beta):
    x = univariate_stable(stream, alpha, beta, scale=1.3, loc=0.4, size=200_000)
    for t in (0.3, 1.0, -2.0):
        emp = np.mean(np.exp(1j * t * x))
        assert abs(emp - stable_cf(t, alpha, beta, 1.3, 0.4)) < 5 / np.sqrt(200_000)
