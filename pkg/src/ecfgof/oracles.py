"""Independent numerical checks that can be run on a live build.

* ``statistic_oracle``: T from pairwise kernel sums against direct Monte
  Carlo integration of the weighted ECF distance (Gaussian kernel).
* ``sampler_cf_oracle``: empirical CF of a large sample against the
  closed-form CF, for the skew-normal, skew-Laplace and stable samplers.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .distributions import SlParams, SnParams, cf, circle_atoms, sample
from .kernels import GAUSSIAN
from .rng import SeedSpec
from .statistic import ecf, mc_oracle, t_stat

ORACLE_DRAWS = 10**6
SE_MULTIPLE = 4.0
CF_DRAWS = 10**5
CF_TOL = 5 / np.sqrt(CF_DRAWS)
GRID_POINTS = 20


@dataclass
class OracleResult:
    name: str
    passed: bool
    value: float
    reference: float
    error: float
    bound: float

    @property
    def margin(self):
        return self.bound - self.error

    def to_dict(self):
        return {**asdict(self), "margin": self.margin}


def random_instance(stream, max_n=50, max_p=3):
    """A small two-sample problem with a random location/scale offset."""
    n = int(stream.integers(2, max_n + 1))
    m = int(stream.integers(2, max_n + 1))
    p = int(stream.integers(1, max_p + 1))
    x = stream.standard_normal((n, p))
    x0 = 0.5 * stream.standard_normal(p) + stream.uniform(0.6, 1.6) * stream.standard_normal((m, p))
    return x, x0


def statistic_oracle(instances=20, draws=ORACLE_DRAWS, seed=SeedSpec(0)):
    out = []
    for i in range(instances):
        x, x0 = random_instance(seed.child(1, i).stream())
        t = t_stat(x, x0, GAUSSIAN).value
        est, se = mc_oracle(x, x0, GAUSSIAN, draws, seed.child(2, i).stream())
        err = abs(t - est)
        bound = SE_MULTIPLE * se
        n, p = x.shape
        out.append(OracleResult(f"statistic[{i}] n={n} m={x0.shape[0]} p={p}", bool(err <= bound), float(t), float(est), float(err), float(bound)))
    return out


def statistic_oracle_passes(results):
    """At least 19 of 20 (in general all but one in twenty) must agree."""
    allowed = len(results) // 20
    return sum(not r.passed for r in results) <= allowed


def t_grid(p, radius, points=GRID_POINTS):
    """Deterministic spread of ``points`` vectors with norms in (0, radius]."""
    k = np.arange(1, points + 1)
    r = radius * k / points
    if p == 1:
        return (r * np.where(k % 2 == 0, 1.0, -1.0))[:, None]
    golden = np.pi * (3 - np.sqrt(5))
    ang = golden * k
    if p == 2:
        return r[:, None] * np.column_stack([np.cos(ang), np.sin(ang)])
    zc = 1 - 2 * (k - 0.5) / points
    rho = np.sqrt(1 - zc * zc)
    u = np.column_stack([rho * np.cos(ang), rho * np.sin(ang), zc])
    if p > 3:
        u = np.column_stack([u, np.zeros((points, p - 3))])
    return r[:, None] * u


def cf_cases():
    """The sampler checks run by default: ``(name, params, t radius)``."""
    return [
        ("sn", SnParams([0.5, -1.0], [[2.0, 0.6], [0.6, 1.0]], [3.0, -1.0]), 2.0),
        ("sl", SlParams([0.3, 0.0], [[1.0, 0.4], [0.4, 1.5]], [1.0, -0.5]), 2.0),
        ("as", circle_atoms(3, 1.5), 1.0),
    ]


def sampler_cf_oracle(draws=CF_DRAWS, seed=SeedSpec(0), cases=None):
    out = []
    for i, (name, params, radius) in enumerate(cf_cases() if cases is None else cases):
        x = sample(params, draws, seed.child(3, i).stream())
        t = t_grid(params.dim, radius)
        err = np.abs(ecf(x, t) - cf(params, t))
        worst = int(np.argmax(err))
        tol = 5 / np.sqrt(draws)
        out.append(OracleResult(f"cf[{name}]", bool(err[worst] <= tol), float(err[worst]), 0.0, float(err[worst]), float(tol)))
    return out


def run_all(instances=20, seed=SeedSpec(0), draws=ORACLE_DRAWS, cf_draws=CF_DRAWS):
    stat = statistic_oracle(instances, draws, seed)
    cfs = sampler_cf_oracle(cf_draws, seed)
    return {
        "statistic": {"passed": statistic_oracle_passes(stat), "results": [r.to_dict() for r in stat]},
        "sampler_cf": {"passed": all(r.passed for r in cfs), "results": [r.to_dict() for r in cfs]},
    }

