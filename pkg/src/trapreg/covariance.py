"""Parametric autocovariances R(s, t) of the error process.

Families:

``wiener``          sigma2 * min(s, t)
``ou``              sigma2 * exp(-lam * |s - t|)
``gen-ou``          sigma2 * rho ** (|s**lam - t**lam| / lam)
``scaled-wiener``   sigma2 * s * t * min(s, t)
``zero``            identically zero (noise-free test oracle)

The jump function ``alpha(t)`` is the left minus the right partial
derivative of R across the diagonal.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy import linalg

from .errors import DomainError, NumericalError

FAMILIES = ("wiener", "ou", "gen-ou", "scaled-wiener", "zero")

# diagonal jitter ladder tried after a plain Cholesky fails
JITTERS = (1e-12, 1e-11, 1e-10)


@dataclass(frozen=True)
class CovModel:
    family: str
    sigma2: float = 1.0
    lam: float | None = None
    rho: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown covariance family {self.family!r}; choose from {FAMILIES}")
        if self.family != "zero" and not self.sigma2 > 0:
            raise DomainError("sigma2 must be positive")
        if self.family in ("ou", "gen-ou"):
            if self.lam is None or not self.lam > 0:
                raise DomainError(f"{self.family} needs lam > 0")
        if self.family == "gen-ou":
            if self.rho is None or not 0 < self.rho < 1:
                raise DomainError("gen-ou needs 0 < rho < 1")

    # constructors mirroring the config names
    @classmethod
    def wiener(cls, sigma2=1.0):
        return cls("wiener", sigma2)

    @classmethod
    def ou(cls, sigma2=1.0, lam=1.0):
        return cls("ou", sigma2, lam=lam)

    @classmethod
    def gen_ou(cls, sigma2=0.5, lam=4.0, rho=0.5):
        return cls("gen-ou", sigma2, lam=lam, rho=rho)

    @classmethod
    def scaled_wiener(cls, sigma2=1.0):
        return cls("scaled-wiener", sigma2)

    @classmethod
    def zero(cls):
        return cls("zero", 0.0)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def __call__(self, s, t):
        return cov_eval(self, s, t)

    def alpha(self, t):
        return jump_alpha(self, t)


def cov_eval(m: CovModel, s, t):
    """R(s, t), broadcasting over array arguments."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    fam = m.family
    if fam == "wiener":
        out = m.sigma2 * np.minimum(s, t)
    elif fam == "ou":
        out = m.sigma2 * np.exp(-m.lam * np.abs(s - t))
    elif fam == "gen-ou":
        out = m.sigma2 * m.rho ** (np.abs(s**m.lam - t**m.lam) / m.lam)
    elif fam == "scaled-wiener":
        out = m.sigma2 * s * t * np.minimum(s, t)
    else:
        out = np.zeros(np.broadcast(s, t).shape)
    return out if np.ndim(out) else float(out)


def jump_alpha(m: CovModel, t):
    """Closed-form jump function along the diagonal."""
    t = np.asarray(t, dtype=float)
    fam = m.family
    if fam == "wiener":
        out = np.full(t.shape, m.sigma2)
    elif fam == "ou":
        out = np.full(t.shape, 2.0 * m.sigma2 * m.lam)
    elif fam == "gen-ou":
        out = -2.0 * m.sigma2 * np.log(m.rho) * t ** (m.lam - 1.0)
    elif fam == "scaled-wiener":
        out = m.sigma2 * t**2
    else:
        raise DomainError("the zero covariance has no jump function")
    return out if np.ndim(out) else float(out)


def cov_matrix(m: CovModel, points) -> np.ndarray:
    """Matrix ``R(t_i, t_j)`` over a design (a ``Design`` or a point array)."""
    t = np.asarray(getattr(points, "points", points), dtype=float)
    if t.size == 0:
        raise DomainError("design is empty")
    S = cov_eval(m, t[:, None], t[None, :])
    S = np.atleast_2d(S)
    return (S + S.T) / 2


def cholesky_factor(S: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, escalating diagonal jitter before giving up."""
    if not np.any(S):
        return np.zeros_like(S)
    for jitter in (0.0,) + JITTERS:
        try:
            return linalg.cholesky(S + jitter * np.eye(len(S)), lower=True)
        except linalg.LinAlgError:
            continue
    raise NumericalError("covariance matrix is not positive semidefinite (Cholesky failed with jitter)")
