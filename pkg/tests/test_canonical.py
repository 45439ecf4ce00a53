import numpy as np
import pytest
from scipy import stats

from ecfgof.distributions import (
    SlParams,
    SnParams,
    StParams,
    canonical_sl,
    canonical_sn,
    canonical_st,
    cf_sl,
    cf_sn,
    sample,
)
from ecfgof.oracles import t_grid
from ecfgof.statistic import ecf

from conftest import random_spd, rng_for


def random_params(stream, p):
    return stream.normal(size=p), random_spd(stream, p) / p, 3 * stream.normal(size=p)


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_htoh_identity(p):
    s = rng_for(p)
    for _ in range(25):
        xi, om, al = random_params(s, p)
        for info in (
            canonical_sn(SnParams(xi, om, al)),
            canonical_st(StParams(xi, om, al, 4.0)),
            canonical_sl(SlParams(xi, om, al)),
        ):
            assert np.allclose(info.H.T @ om @ info.H, np.eye(p), atol=1e-8)
            assert info.alpha_star >= 0


def test_fixed_points():
    for make, canon in ((SnParams, canonical_sn), (SlParams, canonical_sl)):
        info = canon(make([0, 0, 0], np.eye(3), [2.5, 0, 0]))
        assert np.allclose(info.H, np.eye(3))
        assert info.alpha_star == pytest.approx(2.5)
    st_info = canonical_st(StParams([0, 0], np.eye(2), [1.5, 0], 7.0))
    assert np.allclose(st_info.H, np.eye(2))
    assert st_info.params.nu == 7.0


def test_zero_skewness():
    om = np.array([[2.0, 0.3], [0.3, 1.0]])
    for info in (canonical_sn(SnParams([1, 1], om, [0, 0])), canonical_sl(SlParams([1, 1], om, [0, 0]))):
        assert info.alpha_star == 0
        assert np.allclose(info.H.T @ om @ info.H, np.eye(2))


def test_worked_example():
    assert canonical_sl(SlParams([0, 0], np.diag([4.0, 1.0]), [2, 0])).alpha_star == pytest.approx(1.0)


def test_sl_idempotent():
    s = rng_for(9)
    for _ in range(20):
        first = canonical_sl(SlParams(*random_params(s, 3)))
        again = canonical_sl(first.params)
        assert again.params == first.params
        assert np.array_equal(again.H, np.eye(3))


def test_sn_alpha_star_formula():
    params = SnParams([0, 0], [[4, 1], [1, 2]], [1, -2])
    a = params.alpha
    assert canonical_sn(params).alpha_star == pytest.approx(np.sqrt(a @ params.corr @ a))


def test_sn_transformed_sample_matches_canonical_cf():
    params = SnParams([1, -1], [[2, 0.7], [0.7, 1.5]], [2, -3])
    info = canonical_sn(params)
    z = (sample(params, 10**5, rng_for(10)) - params.xi) @ info.H
    t = t_grid(2, 2.0)
    assert np.max(np.abs(ecf(z, t) - cf_sn(info.params, t))) <= 0.02


def test_sl_transformed_sample_matches_canonical_cf():
    params = SlParams([1, -1], [[2, 0.7], [0.7, 1.5]], [0.5, -0.8])
    info = canonical_sl(params)
    z = (sample(params, 10**5, rng_for(11)) - params.xi) @ info.H
    t = t_grid(2, 2.0)
    assert np.max(np.abs(ecf(z, t) - cf_sl(info.params, t))) <= 0.02


def test_st_canonical_skewness_direction():
    params = StParams([0, 2], [[1.5, -0.4], [-0.4, 1]], [-2, 3], 5.0)
    info = canonical_st(params)
    z = (sample(params, 10**5, rng_for(12)) - params.xi) @ info.H
    assert np.sign(stats.skew(z[:, 0])) == np.sign(info.alpha_star)
    assert abs(stats.skew(z[:, 1])) < abs(stats.skew(z[:, 0]))
