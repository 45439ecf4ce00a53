"""Parameter records for the families under test.

Every record is immutable; array fields are stored as read-only float
arrays.  ``family`` is the tag used in JSON documents and on the CLI.
"""

from dataclasses import dataclass

import numpy as np

from ..linalg import check_symmetric


def _vec(x, name):
    a = np.array(x, dtype=float).ravel()
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    a.setflags(write=False)
    return a


def _spd(x, p, name="omega"):
    a = np.array(x, dtype=float)
    if a.shape != (p, p):
        raise ValueError(f"{name} must be {p}x{p}, got {a.shape}")
    check_symmetric(a, rtol=1e-10)
    a = 0.5 * (a + a.T)
    if np.linalg.eigvalsh(a)[0] <= 0:
        raise ValueError(f"{name} is not positive definite")
    a.setflags(write=False)
    return a


class _Record:
    family = ""

    def __setattr__(self, name, value):
        raise AttributeError("parameter records are immutable")

    def _set(self, **kw):
        for k, v in kw.items():
            object.__setattr__(self, k, v)

    @property
    def dim(self):
        return self.xi.size

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return all(_field_eq(getattr(self, k), getattr(other, k)) for k in self._fields)

    def __hash__(self):
        return hash((self.family, self.dim))

    def __repr__(self):
        inner = ", ".join(f"{k}={getattr(self, k)!r}" for k in self._fields)
        return f"{type(self).__name__}({inner})"


def _field_eq(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(a, b)
    return a == b


class SnParams(_Record):
    """Skew-normal SN_p(xi, Omega, alpha) in the Azzalini-Capitanio form.

    Density ``2 phi_p(x - xi; Omega) Phi(alpha' omega^{-1} (x - xi))``.
    """

    family = "sn"
    _fields = ("xi", "omega", "alpha")

    def __init__(self, xi, omega, alpha):
        xi = _vec(xi, "xi")
        p = xi.size
        alpha = _vec(alpha, "alpha")
        if alpha.size != p:
            raise ValueError("alpha and xi must have the same length")
        self._set(xi=xi, omega=_spd(omega, p), alpha=alpha)

    @property
    def scales(self):
        """``diag(omega)`` as a vector: square roots of the diagonal of Omega."""
        return np.sqrt(np.diag(self.omega))

    @property
    def corr(self):
        w = self.scales
        return self.omega / np.outer(w, w)

    @property
    def delta(self):
        ob = self.corr
        a = self.alpha
        return ob @ a / np.sqrt(1.0 + a @ ob @ a)

    @property
    def alpha_star(self):
        a = self.alpha
        return float(np.sqrt(max(a @ self.corr @ a, 0.0)))


class StParams(SnParams):
    family = "st"
    _fields = ("xi", "omega", "alpha", "nu")

    def __init__(self, xi, omega, alpha, nu):
        super().__init__(xi, omega, alpha)
        nu = float(nu)
        if not nu > 0:
            raise ValueError("degrees of freedom must be positive")
        self._set(nu=nu)

    @property
    def sn(self):
        return SnParams(self.xi, self.omega, self.alpha)


class SlParams(_Record):
    """Skew-Laplace SL_p(xi, Omega, alpha) defined through its CF
    ``exp(i t'xi) / (1 + t'Omega t - 2i t'alpha)^((p+1)/2)``."""

    family = "sl"
    _fields = ("xi", "omega", "alpha")

    def __init__(self, xi, omega, alpha):
        xi = _vec(xi, "xi")
        p = xi.size
        alpha = _vec(alpha, "alpha")
        if alpha.size != p:
            raise ValueError("alpha and xi must have the same length")
        self._set(xi=xi, omega=_spd(omega, p), alpha=alpha)


class GhParams(_Record):
    """Tukey g-and-h: ``Y = Omega tau_{g,h}(Z) + xi`` with Z standard normal."""

    family = "gh"
    _fields = ("xi", "omega", "g", "h")

    def __init__(self, xi, omega, g, h):
        xi = _vec(xi, "xi")
        p = xi.size
        g = _vec(g, "g")
        h = _vec(h, "h")
        if g.size != p or h.size != p:
            raise ValueError("g, h and xi must have the same length")
        if np.any(h < 0):
            raise ValueError("h must be componentwise non-negative")
        self._set(xi=xi, omega=_spd(omega, p), g=g, h=h)


class AsParams(_Record):
    """alpha-stable law with a discrete spectral measure.

    ``atoms`` is a ``(k, p)`` array of unit vectors and ``weights`` the
    matching positive masses; ``index`` is the stability index in (0, 2].
    """

    family = "as"
    _fields = ("xi", "atoms", "weights", "index")

    def __init__(self, xi, atoms, weights, index):
        xi = _vec(xi, "xi")
        p = xi.size
        atoms = np.array(atoms, dtype=float).reshape(-1, p)
        weights = _vec(weights, "weights")
        if atoms.shape[0] == 0:
            raise ValueError("at least one atom is required")
        if weights.size != atoms.shape[0]:
            raise ValueError("one weight per atom is required")
        if np.any(weights <= 0):
            raise ValueError("atom weights must be positive")
        if np.max(np.abs(np.linalg.norm(atoms, axis=1) - 1.0)) > 1e-12:
            raise ValueError("atoms must be unit vectors")
        index = float(index)
        if not 0 < index <= 2:
            raise ValueError("stability index must lie in (0, 2]")
        atoms.setflags(write=False)
        self._set(xi=xi, atoms=atoms, weights=weights, index=index)

    @property
    def total_mass(self):
        return float(self.weights.sum())


class SasParams(_Record):
    """Componentwise sinh-arcsinh transform of a standard normal vector."""

    family = "sas"
    _fields = ("e", "f")

    def __init__(self, e, f):
        e = _vec(e, "e")
        f = _vec(f, "f")
        if e.size != f.size:
            raise ValueError("e and f must have the same length")
        if np.any(f <= 0):
            raise ValueError("f must be componentwise positive")
        self._set(e=e, f=f)

    @property
    def dim(self):
        return self.e.size


def circle_atoms(q, index, xi=(0.0, 0.0)):
    """Bivariate spectral measure with mass 1/q at angles 2 pi k / q, k = 1..q."""
    k = np.arange(1, q + 1)
    ang = 2 * np.pi * k / q
    atoms = np.column_stack([np.cos(ang), np.sin(ang)])
    return AsParams(xi, atoms, np.full(q, 1.0 / q), index)


FAMILY_TYPES = {
    "sn": SnParams,
    "st": StParams,
    "sl": SlParams,
    "gh": GhParams,
    "as": AsParams,
    "sas": SasParams,
}
