"""Run the cells of a study configuration."""

import logging
import time

from .distributions import to_dict
from .estimation import EstimationError
from .gof import (
    BootstrapAbort,
    TestConfig,
    nested_bootstrap_study,
    simple_null_critical,
    simple_null_power,
    warp_speed_study,
)
from .optim import RootBracketError
from .rng import SeedSpec

log = logging.getLogger(__name__)

CELL_ERRORS = (EstimationError, BootstrapAbort, RootBracketError, ValueError, ArithmeticError)


def _config(cell, index, threads, mode):
    return TestConfig(
        family=cell.family,
        mode=mode,
        lambda0=cell.lambda0 if mode == "simple" else None,
        n=cell.n,
        m=cell.m,
        M=cell.M,
        B=cell.B,
        delta=cell.delta,
        kernel=cell.kernel,
        seed=SeedSpec(cell.seed, (index,)),
        threads=threads,
    )


def _critical_key(cell):
    return (cell.family, repr(to_dict(cell.lambda0)), cell.n, cell.m, cell.M, cell.delta, str(cell.kernel), cell.seed)


def run_cell(cell, index, threads=1, critical_cache=None):
    """StudyReport for one cell.

    Simple-null cells sharing a null, sample sizes and seed reuse one
    Monte Carlo critical value.
    """
    if cell.protocol == "warp":
        return warp_speed_study(_config(cell, index, threads, "composite"), cell.truth, cell.label)
    if cell.protocol == "nested":
        return nested_bootstrap_study(_config(cell, index, threads, "composite"), cell.truth, cell.label)
    cfg = _config(cell, index, threads, "simple")
    cache = {} if critical_cache is None else critical_cache
    key = _critical_key(cell)
    if key not in cache:
        crit_cfg = TestConfig(**{**cfg.__dict__, "seed": SeedSpec(cell.seed)})
        cache[key] = simple_null_critical(crit_cfg)
    report = simple_null_power(cfg, cell.truth, cell.L, cache[key])
    report.label = cell.label
    return report


def run_study(study, threads=1, keep_statistics=False):
    """Run every cell; a failing cell is recorded and the rest continue."""
    cells, failures = [], []
    cache = {}
    for i, cell in enumerate(study.cells):
        t0 = time.perf_counter()
        try:
            report = run_cell(cell, i, threads, cache)
        except CELL_ERRORS as exc:
            log.error("cell %r failed: %s", cell.label, exc)
            failures.append({"index": i, "label": cell.label, "error": f"{type(exc).__name__}: {exc}"})
            continue
        doc = report.to_dict()
        if not keep_statistics:
            doc.pop("statistics")
            doc.pop("reference")
        doc.update(index=i, protocol=cell.protocol, x=cell.x, series=cell.series, wall_time=time.perf_counter() - t0)
        cells.append(doc)
    return cells, failures
