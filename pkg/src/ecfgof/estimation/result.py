from dataclasses import dataclass, field

import numpy as np

from ..distributions import to_dict


class EstimationError(RuntimeError):
    """An estimator could not produce usable parameters."""


@dataclass
class FitResult:
    params: object
    objective: float
    converged: bool
    iterations: int
    notes: list = field(default_factory=list)
    trace: list = None

    def to_dict(self):
        return {
            "params": to_dict(self.params),
            "objective": float(self.objective),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "notes": list(self.notes),
        }


def tril_pack(chol):
    """Flatten a lower-triangular factor, storing the diagonal as logs."""
    p = chol.shape[0]
    out = chol[np.tril_indices(p)].copy()
    diag_pos = _diag_positions(p)
    out[diag_pos] = np.log(out[diag_pos])
    return out


def tril_unpack(vec, p):
    chol = np.zeros((p, p))
    chol[np.tril_indices(p)] = vec
    idx = np.arange(p)
    chol[idx, idx] = np.exp(chol[idx, idx])
    return chol


def _diag_positions(p):
    rows, cols = np.tril_indices(p)
    return np.flatnonzero(rows == cols)


def n_tril(p):
    return p * (p + 1) // 2


def regularize(omega, notes):
    """Ridge-adjust a scatter matrix whose condition number exceeds 1e12."""
    omega = 0.5 * (omega + omega.T)
    lam = np.linalg.eigvalsh(omega)
    if lam[0] <= 0 or lam[-1] / lam[0] > 1e12:
        p = omega.shape[0]
        ridge = 1e-8 * np.trace(omega) / p
        if lam[0] <= 0:
            ridge += -lam[0]
        omega = omega + ridge * np.eye(p)
        notes.append(f"scatter matrix ridge-adjusted by {ridge:.3g}")
    return omega
