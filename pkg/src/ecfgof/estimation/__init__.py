from .result import EstimationError, FitResult
from .skewnormal import fit_sn, fit_st, moment_start
from .skewlaplace import fit_sl, fit_sl_em, posterior_moments
from .tukey import fit_gh, gh_loglik, gh_loglik_reference, gh_start, quantile_gh
from .stable import directions, fit_as, fit_stable_ecf
from ..optim import OptimizerOpts, find_root_increasing, nelder_mead
