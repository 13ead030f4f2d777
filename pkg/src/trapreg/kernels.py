"""Even polynomial kernels on [-1, 1] and their moment constants.

Every kernel here is a polynomial in ``u**2`` on the support, which makes
evenness hold by construction and gives closed-form antiderivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainError
from .quadrature import simpson_rule

__all__ = [
    "Kernel",
    "KernelConstants",
    "QUADRATIC",
    "TRIWEIGHT",
    "get_kernel",
    "eval_kernel",
    "kernel_constants",
    "analytic_constants",
    "phi",
    "kernel_cdf_integral",
]


class KernelConstants(NamedTuple):
    B: float  # second moment
    V: float  # integral of K**2
    C_K: float  # double integral of |u - v| K(u) K(v)


@dataclass(frozen=True, eq=False)
class Kernel:
    """Kernel ``K(u) = sum_j c_j u**(2j)`` for ``|u| <= 1`` and zero outside.

    ``family`` is one of ``"quadratic"``, ``"triweight"`` or ``"tabulated"``.
    """

    family: str
    coeffs: tuple[float, ...] = field(repr=False)

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if not c:
            raise DomainError("kernel needs at least one coefficient")
        object.__setattr__(self, "coeffs", c)
        x, w = simpson_rule(-1.0, 1.0, 4096)
        mass = float(w @ self.poly(x))
        if abs(mass - 1.0) > 1e-10:
            raise DomainError(f"kernel integrates to {mass!r}, not 1")

    @classmethod
    def tabulated(cls, coeffs: Sequence[float]) -> "Kernel":
        """User kernel from coefficients of ``u**0, u**2, u**4, ...``."""
        return cls("tabulated", tuple(coeffs))

    @cached_property
    def poly(self) -> Polynomial:
        """The kernel as an ordinary polynomial in ``u`` (valid on [-1, 1])."""
        full = np.zeros(2 * len(self.coeffs) - 1)
        full[::2] = self.coeffs
        return Polynomial(full)

    @cached_property
    def _antiderivative(self) -> Polynomial:
        return self.poly.integ(lbnd=-1.0)

    @cached_property
    def constants(self) -> KernelConstants:
        return analytic_constants(self)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.where(np.abs(u) <= 1.0, self.poly(np.clip(u, -1.0, 1.0)), 0.0)
        return out if out.ndim else float(out)

    def cdf(self, u):
        """``int_{-1}^{u} K``, clamped to [0, 1] outside the support."""
        u = np.clip(np.asarray(u, dtype=float), -1.0, 1.0)
        out = self._antiderivative(u)
        return out if np.ndim(out) else float(out)

    def __repr__(self):
        return f"Kernel({self.family!r})"


QUADRATIC = Kernel("quadratic", (15 / 16, -30 / 16, 15 / 16))
TRIWEIGHT = Kernel("triweight", (35 / 32, -105 / 32, 105 / 32, -35 / 32))

_NAMED = {"quadratic": QUADRATIC, "triweight": TRIWEIGHT}


def get_kernel(name: str) -> Kernel:
    try:
        return _NAMED[name.lower()]
    except KeyError:
        raise DomainError(f"unknown kernel {name!r}; choose from {sorted(_NAMED)}") from None


def eval_kernel(k: Kernel, u):
    return k(u)


def phi(x, h: float, t, k: Kernel):
    """Rescaled kernel ``K((x - t) / h) / h``."""
    if h <= 0:
        raise DomainError("bandwidth must be positive")
    return k((np.asarray(x, dtype=float) - np.asarray(t, dtype=float)) / h) / h


def kernel_cdf_integral(k: Kernel, a, b):
    """``int_a^b K(u) du`` with the limits clamped to the support."""
    return k.cdf(b) - k.cdf(a)


def analytic_constants(k: Kernel) -> KernelConstants:
    """Exact B, V and C_K by polynomial integration."""
    p = k.poly
    u = Polynomial([0.0, 1.0])

    def integral(q: Polynomial) -> float:
        Q = q.integ()
        return float(Q(1.0) - Q(-1.0))

    B = integral(u * u * p)
    V = integral(p * p)
    # |u-v| splits at the diagonal: C_K = 2 int K(u) [u P0(u) - P1(u)] du
    P0 = p.integ(lbnd=-1.0)
    P1 = (u * p).integ(lbnd=-1.0)
    C_K = 2.0 * integral(p * (u * P0 - P1))
    return KernelConstants(B, V, C_K)


def kernel_constants(k: Kernel, quad_points: int = 1024) -> KernelConstants:
    """B, V and C_K by composite Simpson with ``quad_points`` panels.

    C_K is reduced to an outer integral over u of the inner integral over
    v < u so that both integrands are smooth.
    """
    if quad_points < 64:
        raise DomainError("quad_points must be at least 64")
    x, w = simpson_rule(-1.0, 1.0, quad_points)
    K = k(x)
    B = float(w @ (x * x * K))
    V = float(w @ (K * K))

    s, ws = simpson_rule(0.0, 1.0, quad_points)
    span = x + 1.0
    v = -1.0 + span[:, None] * s[None, :]
    inner = ((x[:, None] - v) * k(v)) @ ws * span
    C_K = 2.0 * float(w @ (K * inner))
    return KernelConstants(B, V, C_K)
