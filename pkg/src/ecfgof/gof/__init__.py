"""Goodness-of-fit protocols built on the ECF statistic."""

from .families import FAMILIES, canonical_null, get_family, is_canonical, standardize
from .protocols import (
    DEFAULT_B,
    BootstrapAbort,
    CriticalValue,
    StudyReport,
    TestConfig,
    TestOutcome,
    bootstrap_p_value,
    composite_test,
    nested_bootstrap_study,
    parallel_map,
    simple_null_critical,
    simple_null_power,
    simple_test,
    upper_quantile,
    warp_speed_study,
)
