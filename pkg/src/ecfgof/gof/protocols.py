"""Simple-null Monte Carlo tests, composite parametric bootstrap tests and
warp-speed size/power studies.

Every replication draws from its own stream, addressed by
``seed.child(stage, replication, attempt, step)``, and results are reduced
in replication order, so no reported number depends on the worker count.
A replication whose fit fails is redrawn once with a fresh stream and then
skipped; the skip count is reported.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..distributions import sample, to_dict
from ..estimation import EstimationError
from ..kernels import GAUSSIAN, KernelSpec
from ..optim import RootBracketError
from ..rng import SeedSpec
from ..statistic import StatValue, t_stat
from .families import get_family, is_canonical

log = logging.getLogger(__name__)

DEFAULT_DELTA = 0.05
DEFAULT_M = 1000
DEFAULT_B = 199
MAX_BOOT_FAILURE = 0.05
FIT_ERRORS = (EstimationError, RootBracketError, ValueError, np.linalg.LinAlgError, FloatingPointError)

# first path component of every stream, one per protocol
STAGE_COMPOSITE = 1
STAGE_BOOT = 2
STAGE_CRITICAL = 3
STAGE_POWER = 4
STAGE_WARP = 5
STAGE_NESTED = 6


class BootstrapAbort(RuntimeError):
    """Too many bootstrap refits failed for the p-value to be trusted."""


@dataclass
class TestConfig:
    family: str
    mode: str = "composite"
    lambda0: object = None
    n: int = 100
    m: int = None
    M: int = DEFAULT_M
    B: int = DEFAULT_B
    delta: float = DEFAULT_DELTA
    kernel: KernelSpec = GAUSSIAN
    seed: SeedSpec = field(default_factory=lambda: SeedSpec(0))
    threads: int = 1

    __test__ = False  # not a pytest class

    def __post_init__(self):
        get_family(self.family)
        if self.mode not in ("simple", "composite"):
            raise ValueError("mode must be 'simple' or 'composite'")
        if self.m is None:
            self.m = self.n
        if self.n < 1 or self.m < 1 or self.M < 1 or self.B < 1:
            raise ValueError("n, m, M and B must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not isinstance(self.seed, SeedSpec):
            self.seed = SeedSpec(int(self.seed))
        if self.mode == "simple":
            if self.lambda0 is None:
                raise ValueError("simple mode needs a null shape lambda0")
            if self.lambda0.family != self.family:
                raise ValueError("lambda0 belongs to a different family")
            if not is_canonical(self.lambda0):
                raise ValueError("lambda0 must be given in canonical form (zero location, identity scatter)")

    def to_dict(self):
        return {
            "family": self.family,
            "mode": self.mode,
            "lambda0": None if self.lambda0 is None else to_dict(self.lambda0),
            "n": self.n,
            "m": self.m,
            "M": self.M,
            "B": self.B,
            "delta": self.delta,
            "kernel": str(self.kernel),
            "seed": {"master": self.seed.master_seed, "path": list(self.seed.path)},
        }


@dataclass
class TestOutcome:
    statistic: StatValue
    estimates: object
    null: object
    p_value: float = None
    critical_value: float = None
    reject: bool = None
    replications: int = 0
    failures: int = 0
    bootstrap: list = None
    notes: list = field(default_factory=list)

    __test__ = False

    def to_dict(self):
        return {
            "statistic": self.statistic.value,
            "n": self.statistic.n,
            "m": self.statistic.m,
            "kernel": str(self.statistic.kernel),
            "p_value": self.p_value,
            "critical_value": self.critical_value,
            "reject": self.reject,
            "estimates": to_dict(self.estimates),
            "null": to_dict(self.null),
            "replications": self.replications,
            "failures": self.failures,
            "notes": list(self.notes),
        }


@dataclass
class StudyReport:
    config: TestConfig
    truth: object
    rejection_rate: float
    rejections: int
    completed: int
    skipped: int
    critical_value: float
    statistics: list
    reference: list
    label: str = ""

    def to_dict(self):
        return {
            "label": self.label,
            "config": self.config.to_dict(),
            "truth": to_dict(self.truth),
            "rejection_rate": self.rejection_rate,
            "rejections": self.rejections,
            "completed": self.completed,
            "skipped": self.skipped,
            "critical_value": self.critical_value,
            "statistics": [float(v) for v in self.statistics],
            "reference": [float(v) for v in self.reference],
        }


def upper_quantile(values, delta):
    """The ``ceil((1 - delta) M)``-th smallest of ``M`` values."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise ValueError("no values to take a quantile of")
    # the small offset keeps e.g. (1 - 0.05) * 1000 at 950
    k = math.ceil((1 - delta) * v.size - 1e-9)
    return float(v[min(max(k, 1), v.size) - 1])


def bootstrap_p_value(t_obs, t_boot):
    t_boot = np.asarray(t_boot, dtype=float)
    return (1 + int(np.sum(t_boot >= t_obs))) / (t_boot.size + 1)


def parallel_map(fn, items, threads=1):
    """``[fn(i) for i in items]``, optionally across worker processes."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(i) for i in items]
    chunk = max(1, len(items) // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


# -- single steps ----------------------------------------------------------


def _statistic(fam, x, fit_params, seed, m, kernel):
    z, null = fam.standardize(x, fit_params)
    x0 = sample(null, m, seed.stream())
    return t_stat(z, x0, kernel), null


def _free_cycle(fam, truth, seed, n, m, kernel):
    """Draw ``n`` rows from ``truth``, fit freely, standardize and compute T."""
    x = sample(truth, n, seed.child(0).stream())
    fit = fam.fit_free(x)
    stat, null = _statistic(fam, x, fit.params, seed.child(1), m, kernel)
    return stat.value, null


def _with_retry(seed, work):
    """Run ``work(seed.child(attempt))`` for attempt 0, then 1 on failure."""
    errors = []
    for attempt in (0, 1):
        try:
            return work(seed.child(attempt)), errors
        except FIT_ERRORS as exc:
            errors.append(f"{type(exc).__name__}: {exc}")
    return None, errors


# -- simple null -------------------------------------------------------------


def _simple_rep(args):
    cfg, truth, stage, r = args
    fam = get_family(cfg.family)

    def work(seed):
        x = sample(truth, cfg.n, seed.child(0).stream())
        # nuisance transform from the unrestricted fit; only the reference
        # sample carries the null shape
        fit = fam.fit_free(x)
        z, _ = fam.standardize(x, fit.params)
        x0 = sample(cfg.lambda0, cfg.m, seed.child(1).stream())
        return t_stat(z, x0, cfg.kernel).value

    return _with_retry(cfg.seed.child(stage, r), work)


def _simple_stats(cfg, truth, stage, count):
    results = parallel_map(_simple_rep, [(cfg, truth, stage, r) for r in range(count)], cfg.threads)
    stats = [v for v, _ in results if v is not None]
    skipped = sum(v is None for v, _ in results)
    for r, (v, errs) in enumerate(results):
        if errs:
            log.warning("replication %d: %s", r, "; ".join(errs))
    if not stats:
        raise EstimationError("every replication failed")
    return stats, skipped


@dataclass
class CriticalValue:
    value: float
    statistics: list
    skipped: int

    def __float__(self):
        return self.value


def simple_null_critical(config):
    """Monte Carlo ``(1 - delta)`` critical value of T under the simple null."""
    if config.mode != "simple":
        raise ValueError("simple_null_critical needs a simple-mode config")
    stats, skipped = _simple_stats(config, config.lambda0, STAGE_CRITICAL, config.M)
    return CriticalValue(upper_quantile(stats, config.delta), stats, skipped)


def simple_null_power(config, alternative, L=None, critical=None):
    """Rejection rate over ``L`` samples from ``alternative`` under the simple null."""
    if critical is None:
        critical = simple_null_critical(config)
    L = config.M if L is None else int(L)
    stats, skipped = _simple_stats(config, alternative, STAGE_POWER, L)
    c = float(critical)
    rejections = int(np.sum(np.asarray(stats) > c))
    return StudyReport(
        config,
        alternative,
        rejections / len(stats),
        rejections,
        len(stats),
        skipped,
        c,
        stats,
        list(getattr(critical, "statistics", [])),
    )


def simple_test(x, config, critical=None):
    """Test one sample against the simple null (Monte Carlo critical value)."""
    if critical is None:
        critical = simple_null_critical(config)
    fam = get_family(config.family)
    fit = fam.fit_free(x)
    z, _ = fam.standardize(x, fit.params)
    x0 = sample(config.lambda0, config.m, config.seed.child(STAGE_COMPOSITE).stream())
    stat = t_stat(z, x0, config.kernel, threads=config.threads)
    c = float(critical)
    mc_stats = getattr(critical, "statistics", None)
    return TestOutcome(
        stat,
        fit.params,
        config.lambda0,
        p_value=bootstrap_p_value(stat.value, mc_stats) if mc_stats else None,
        critical_value=c,
        reject=bool(stat.value > c),
        replications=len(getattr(critical, "statistics", [])),
        failures=getattr(critical, "skipped", 0),
        notes=list(fit.notes),
    )


# -- composite null ----------------------------------------------------------


def _boot_rep(args):
    cfg, null, r = args
    fam = get_family(cfg.family)
    return _with_retry(
        cfg.seed.child(STAGE_BOOT, r),
        lambda seed: _free_cycle(fam, null, seed, cfg.n, cfg.m, cfg.kernel)[0],
    )


def composite_test(x, config):
    """Parametric bootstrap p-value for the composite null."""
    if config.mode != "composite":
        raise ValueError("composite_test needs a composite-mode config")
    fam = get_family(config.family)
    fit = fam.fit_free(x)
    stat, null = _statistic(fam, x, fit.params, config.seed.child(STAGE_COMPOSITE), config.m, config.kernel)
    n = np.asarray(x).shape[0]
    cfg = config if n == config.n else TestConfig(**{**config.__dict__, "n": n})
    results = parallel_map(_boot_rep, [(cfg, null, b) for b in range(cfg.B)], cfg.threads)
    boot = [v for v, _ in results if v is not None]
    failures = sum(v is None for v, _ in results)
    notes = list(fit.notes)
    if failures:
        notes.append(f"{failures} of {cfg.B} bootstrap refits failed twice and were skipped")
    if failures >= MAX_BOOT_FAILURE * cfg.B:
        raise BootstrapAbort(f"{failures} of {cfg.B} bootstrap refits failed")
    return TestOutcome(
        stat,
        fit.params,
        null,
        p_value=bootstrap_p_value(stat.value, boot),
        replications=len(boot),
        failures=failures,
        bootstrap=boot,
        notes=notes,
    )


def _warp_rep(args):
    cfg, truth, r = args
    fam = get_family(cfg.family)

    def work(seed):
        t_obs, null = _free_cycle(fam, truth, seed.child(0), cfg.n, cfg.m, cfg.kernel)
        t_boot, _ = _free_cycle(fam, null, seed.child(1), cfg.n, cfg.m, cfg.kernel)
        return t_obs, t_boot

    return _with_retry(cfg.seed.child(STAGE_WARP, r), work)


def warp_speed_study(config, truth, label=""):
    """Size or power by the warp-speed bootstrap: one bootstrap statistic per
    replication, pooled into a single critical value."""
    if config.mode != "composite":
        raise ValueError("warp_speed_study needs a composite-mode config")
    results = parallel_map(_warp_rep, [(config, truth, r) for r in range(config.M)], config.threads)
    pairs = [v for v, _ in results if v is not None]
    skipped = len(results) - len(pairs)
    for r, (v, errs) in enumerate(results):
        if errs:
            log.warning("replication %d: %s", r, "; ".join(errs))
    if not pairs:
        raise EstimationError("every replication failed")
    t_obs = np.array([a for a, _ in pairs])
    t_boot = np.array([b for _, b in pairs])
    c = upper_quantile(t_boot, config.delta)
    rejections = int(np.sum(t_obs > c))
    return StudyReport(config, truth, rejections / t_obs.size, rejections, t_obs.size, skipped, c, t_obs.tolist(), t_boot.tolist(), label)


def _nested_rep(args):
    cfg, truth, r = args
    x = sample(truth, cfg.n, cfg.seed.child(STAGE_NESTED, r).stream())
    inner = TestConfig(**{**cfg.__dict__, "seed": cfg.seed.child(STAGE_NESTED, r, 1), "threads": 1})
    try:
        out = composite_test(x, inner)
    except FIT_ERRORS + (BootstrapAbort,) as exc:
        return None, [f"{type(exc).__name__}: {exc}"]
    return out.p_value, []


def nested_bootstrap_study(config, truth, label=""):
    """Size or power with a full ``B``-cycle bootstrap in every replication
    (``M * B`` refits; meant for small ``M``)."""
    results = parallel_map(_nested_rep, [(config, truth, r) for r in range(config.M)], config.threads)
    pvals = [v for v, _ in results if v is not None]
    if not pvals:
        raise EstimationError("every replication failed")
    rejections = int(np.sum(np.asarray(pvals) <= config.delta))
    return StudyReport(
        config, truth, rejections / len(pvals), rejections, len(pvals), len(results) - len(pvals), config.delta, pvals, [], label
    )
