"""Per-family glue between estimation, standardization and null sampling.

Each family knows how to

* fit a sample (all parameters free),
* map a sample to the standard location/scatter through the fitted
  parameters, returning the canonical null law that the mapped sample
  should follow,
* describe the shape of a canonical null for reports.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..distributions import (
    AsParams,
    GhParams,
    SlParams,
    SnParams,
    canonical_sl,
    canonical_sn,
    canonical_st,
)
from ..estimation import fit_as, fit_gh, fit_sl, fit_sn, fit_st


@dataclass(frozen=True)
class Family:
    tag: str
    fit_free: Callable
    standardize: Callable
    shape: Callable


def _canonical_standardize(canon):
    def run(x, params):
        info = canon(params)
        return (np.asarray(x) - params.xi) @ info.H, info.params

    return run


def _gh_standardize(x, params):
    z = np.linalg.solve(params.omega, (np.asarray(x) - params.xi).T).T
    p = params.dim
    return z, GhParams(np.zeros(p), np.eye(p), params.g, params.h)


def _as_standardize(x, params):
    p = params.dim
    return np.asarray(x) - params.xi, AsParams(np.zeros(p), params.atoms, params.weights, params.index)


def _alpha_star(params):
    return float(params.alpha[0])


FAMILIES = {
    "sn": Family(
        "sn",
        fit_sn,
        _canonical_standardize(canonical_sn),
        lambda null: {"alpha_star": _alpha_star(null)},
    ),
    "st": Family(
        "st",
        fit_st,
        _canonical_standardize(canonical_st),
        lambda null: {"alpha_star": _alpha_star(null), "nu": float(null.nu)},
    ),
    "sl": Family(
        "sl",
        fit_sl,
        _canonical_standardize(canonical_sl),
        lambda null: {"alpha_star": _alpha_star(null)},
    ),
    "gh": Family(
        "gh",
        fit_gh,
        _gh_standardize,
        lambda null: {"g": null.g.tolist(), "h": null.h.tolist()},
    ),
    "as": Family(
        "as",
        fit_as,
        _as_standardize,
        lambda null: {"index": float(null.index), "total_mass": null.total_mass, "n_atoms": int(null.weights.size)},
    ),
}


def get_family(tag):
    try:
        return FAMILIES[tag]
    except KeyError:
        raise ValueError(f"no goodness-of-fit support for family {tag!r}") from None


def standardize(sample, family, fit):
    """Map ``sample`` through fitted parameters; returns ``(rows, canonical null)``.

    ``fit`` may be a :class:`~ecfgof.estimation.FitResult` or a parameter record.
    """
    params = getattr(fit, "params", fit)
    return get_family(family).standardize(sample, params)


def canonical_null(params):
    """The canonical form of a parameter record (its standardized law)."""
    p = params.dim
    return get_family(params.family).standardize(np.zeros((1, p)), params)[1]


def is_canonical(params, tol=1e-12):
    """True when ``params`` already sits at the standard location/scatter."""
    p = params.dim
    if np.max(np.abs(params.xi)) > tol:
        return False
    if isinstance(params, AsParams):
        return True
    if np.max(np.abs(params.omega - np.eye(p))) > tol:
        return False
    if isinstance(params, (SnParams, SlParams)):
        return np.max(np.abs(params.alpha[1:])) <= tol and params.alpha[0] >= 0
    return True

