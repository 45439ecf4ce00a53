"""Samplers, characteristic functions, densities and canonical forms."""

from .params import (
    FAMILY_TYPES,
    AsParams,
    GhParams,
    SasParams,
    SlParams,
    SnParams,
    StParams,
    circle_atoms,
)
from .serialize import from_dict, to_dict
from .skew import (
    CanonicalInfo,
    canonical_sl,
    canonical_sn,
    canonical_st,
    cf_sl,
    cf_sn,
    sample_sl,
    sample_sn,
    sample_st,
    sl_logpdf,
    sn_logpdf,
    st_logpdf,
)
from .stable import cf_as, psi_alpha, sample_as, shifted_location
from .tukey import (
    sample_gh,
    sample_sas,
    sinh_arcsinh,
    tau_gh,
    tau_gh_inv,
    tau_gh_inv_array,
    tau_gh_log_prime,
    tau_gh_prime,
)

_SAMPLERS = {
    "sn": sample_sn,
    "st": sample_st,
    "sl": sample_sl,
    "gh": sample_gh,
    "as": sample_as,
    "sas": sample_sas,
}

_CFS = {"sn": cf_sn, "sl": cf_sl, "as": cf_as}


def sample(params, n, stream):
    """Draw ``n`` rows from any supported family."""
    return _SAMPLERS[params.family](params, int(n), stream)


def cf(params, t):
    try:
        fn = _CFS[params.family]
    except KeyError:
        raise NotImplementedError(f"no analytic CF for family {params.family!r}") from None
    return fn(params, t)
