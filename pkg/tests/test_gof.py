import dataclasses

import numpy as np
import pytest

from ecfgof.distributions import GhParams, SnParams, StParams, circle_atoms, from_dict, sample
from ecfgof.estimation import EstimationError, fit_sn
from ecfgof.gof import (
    BootstrapAbort,
    TestConfig,
    bootstrap_p_value,
    composite_test,
    get_family,
    simple_null_critical,
    simple_null_power,
    simple_test,
    standardize,
    upper_quantile,
    warp_speed_study,
)
from ecfgof.gof import families
from ecfgof.rng import SeedSpec
from ecfgof.statistic import ecf
from ecfgof.oracles import t_grid
from ecfgof.distributions import cf_sn

I2 = np.eye(2)
SN3 = SnParams([0, 0], I2, [3, 0])


def binomial_band(rate, delta, count):
    sigma = np.sqrt(delta * (1 - delta) / count)
    return abs(rate - delta) <= 3 * sigma


def patch_sn(monkeypatch, fit):
    fam = dataclasses.replace(families.FAMILIES["sn"], fit_free=fit)
    monkeypatch.setitem(families.FAMILIES, "sn", fam)


def test_quantile_rule_is_order_statistic():
    v = SeedSpec(1).stream().permutation(np.arange(1, 1001)).astype(float)
    assert upper_quantile(v, 0.05) == 950.0
    assert upper_quantile(np.arange(1.0, 200.0), 0.05) == 190.0
    with pytest.raises(ValueError):
        upper_quantile([], 0.05)


def test_p_value_formula():
    boot = np.r_[np.full(4, 10.0), np.zeros(95)]
    assert bootstrap_p_value(5.0, boot) == pytest.approx(0.05)
    assert bootstrap_p_value(5.0, np.r_[np.full(5, 10.0), np.zeros(94)]) - 0.05 == pytest.approx(1 / 100)
    assert bootstrap_p_value(100.0, np.zeros(99)) == pytest.approx(1 / 100)
    assert bootstrap_p_value(-1.0, np.zeros(99)) == 1.0


def test_config_validation():
    with pytest.raises(ValueError):
        TestConfig("zz")
    with pytest.raises(ValueError):
        TestConfig("sn", delta=1.5)
    with pytest.raises(ValueError):
        TestConfig("sn", mode="simple")
    with pytest.raises(ValueError):
        TestConfig("sn", mode="simple", lambda0=SnParams([1, 0], I2, [3, 0]))
    cfg = TestConfig("sn", n=50)
    assert cfg.m == 50 and cfg.M == 1000 and cfg.delta == 0.05


def test_standardize_sn_true_params_matches_canonical_cf():
    params = SnParams([1, -2], [[2, 0.5], [0.5, 1]], [-1, 3])
    x = sample(params, 10**5, SeedSpec(2).stream())
    z, null = standardize(x, "sn", params)
    t = t_grid(2, 2.0)
    assert np.max(np.abs(ecf(z, t) - cf_sn(null, t))) <= 0.02


def test_standardize_gh_identity_and_as_translation():
    x = SeedSpec(3).stream().standard_normal((20, 2))
    z, null = standardize(x, "gh", GhParams([0, 0], I2, [1, 0], [0.2, 0.3]))
    assert np.array_equal(z, x)
    assert np.array_equal(null.g, [1, 0])
    shifted = circle_atoms(3, 1.5, xi=(1.0, -1.0))
    z, null = standardize(x, "as", shifted)
    assert np.allclose(z, x - [1, -1])
    d = lambda a: np.linalg.norm(a[:, None] - a[None], axis=-1)  # noqa: E731
    assert np.allclose(d(z), d(x))
    assert np.array_equal(null.xi, [0, 0])


def test_critical_value_reproducible():
    cfg = TestConfig("sn", mode="simple", lambda0=SN3, n=60, M=40, seed=SeedSpec(4))
    a, b = simple_null_critical(cfg), simple_null_critical(cfg)
    assert a.value == b.value and a.statistics == b.statistics
    assert a.value == upper_quantile(a.statistics, 0.05)


def test_thread_count_does_not_change_results():
    cfg = TestConfig("sn", n=50, M=12, seed=SeedSpec(5))
    one = warp_speed_study(cfg, SN3)
    two = warp_speed_study(TestConfig("sn", n=50, M=12, seed=SeedSpec(5), threads=2), SN3)
    assert one.statistics == two.statistics and one.reference == two.reference
    assert one.rejection_rate == two.rejection_rate


def test_warp_report_invariants():
    cfg = TestConfig("sn", n=50, M=30, seed=SeedSpec(6))
    rep = warp_speed_study(cfg, SN3)
    assert rep.rejection_rate == rep.rejections / rep.completed
    assert rep.completed + rep.skipped == 30
    again = warp_speed_study(cfg, SN3)
    assert again.to_dict() == rep.to_dict()
    # rejection is monotone in delta on a fixed replication set
    rates = [np.mean(np.asarray(rep.statistics) > upper_quantile(rep.reference, d)) for d in (0.01, 0.05, 0.1, 0.3)]
    assert rates == sorted(rates)


def test_composite_outcome():
    x = sample(SnParams([1, 1], [[1, 0.2], [0.2, 2]], [2, 0]), 80, SeedSpec(7).stream())
    out = composite_test(x, TestConfig("sn", n=80, B=19, seed=SeedSpec(8)))
    assert out.p_value in {k / 20 for k in range(1, 21)}
    assert out.replications + out.failures == 19
    assert out.p_value == bootstrap_p_value(out.statistic.value, out.bootstrap)
    assert out.to_dict()["null"]["family"] == "sn"


def test_simple_test_dispatch():
    cfg = TestConfig("sn", mode="simple", lambda0=SN3, n=60, M=30, seed=SeedSpec(9))
    x = sample(SnParams([2, 0], I2, [3, 0]), 60, SeedSpec(10).stream())
    out = simple_test(x, cfg)
    assert out.reject == (out.statistic.value > out.critical_value)
    assert 0 < out.p_value <= 1


@pytest.mark.parametrize("failing,skipped", [({1}, 0), ({1, 2}, 5)])
def test_retry_then_skip(monkeypatch, failing, skipped):
    calls = {"n": 0}

    def flaky(x, alpha_star=None):
        calls["n"] += 1
        if calls["n"] % 3 in failing:
            raise EstimationError("synthetic failure")
        return fit_sn(x, alpha_star=alpha_star)

    patch_sn(monkeypatch, flaky)
    cfg = TestConfig("sn", mode="simple", lambda0=SN3, n=40, M=10, seed=SeedSpec(11))
    crit = simple_null_critical(cfg)
    assert len(crit.statistics) + crit.skipped == 10
    assert crit.skipped == skipped


def test_bootstrap_abort(monkeypatch):
    fam = get_family("sn")
    x = sample(SN3, 60, SeedSpec(12).stream())
    fit = fam.fit_free(x)
    calls = {"n": 0}

    def first_ok(data):
        calls["n"] += 1
        if calls["n"] == 1:
            return fit
        raise EstimationError("always fails")

    patch_sn(monkeypatch, first_ok)
    with pytest.raises(BootstrapAbort):
        composite_test(x, TestConfig("sn", n=60, B=9, seed=SeedSpec(13)))


def test_every_replication_failing(monkeypatch):
    def broken(*a, **k):
        raise EstimationError("no")

    patch_sn(monkeypatch, broken)
    with pytest.raises(EstimationError):
        warp_speed_study(TestConfig("sn", n=40, M=3), SN3)


@pytest.mark.slow
def test_simple_null_size_self_consistency():
    cfg = TestConfig("sn", mode="simple", lambda0=SN3, n=100, M=1000, seed=SeedSpec(14))
    crit = simple_null_critical(cfg)
    rep = simple_null_power(cfg, SN3, L=1000, critical=crit)
    assert binomial_band(rep.rejection_rate, 0.05, 1000)


@pytest.mark.slow
def test_composite_size_at_reduced_scale():
    truth = SnParams([0, 0], I2, [2, 0])
    rejections = 0
    for r in range(200):
        x = sample(truth, 50, SeedSpec(15, (r,)).stream())
        out = composite_test(x, TestConfig("sn", n=50, B=19, seed=SeedSpec(16, (r,))))
        rejections += out.p_value <= 0.05
    assert 0.01 <= rejections / 200 <= 0.10


@pytest.mark.slow
def test_st_simple_null_power_at_large_nu():
    null = StParams([0, 0], I2, [3, 0], 5.0)
    cfg = TestConfig("st", mode="simple", lambda0=null, n=1000, M=200, seed=SeedSpec(17))
    rep = simple_null_power(cfg, StParams([0, 0], I2, [3, 0], 34.0), L=200)
    assert rep.rejection_rate >= 0.9
