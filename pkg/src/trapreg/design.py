"""Sampling designs on [0, 1] and design densities."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidDensity
from .quadrature import integrate_unit


@dataclass(frozen=True)
class DensitySpec:
    """A positive density on [0, 1] with an optional closed-form CDF and inverse.

    When ``cdf`` is missing it is obtained by quadrature; when ``inv_cdf`` is
    missing, ``regular_design`` inverts the CDF by bisection.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    cdf: Callable[[np.ndarray], np.ndarray] | None = None
    inv_cdf: Callable[[np.ndarray], np.ndarray] | None = None
    label: str = "custom"
    # densities such as t**(1/3) vanish at 0; positivity is then only
    # required on (0, 1]
    allow_zero_at_origin: bool = False
    bounds: tuple[float, float] = field(init=False)

    def __post_init__(self):
        grid = np.linspace(0.0, 1.0, 10_001)
        vals = np.asarray(self.eval(grid), dtype=float) * np.ones_like(grid)
        if not np.all(np.isfinite(vals)):
            raise InvalidDensity(f"density {self.label!r} is not finite on [0, 1]")
        check = vals[1:] if self.allow_zero_at_origin else vals
        if check.min() <= 0:
            raise InvalidDensity(f"density {self.label!r} is not strictly positive")
        mass = integrate_unit(lambda t: float(self.eval(np.asarray(t))))
        if abs(mass - 1.0) > 1e-8:
            raise InvalidDensity(f"density {self.label!r} integrates to {mass:.12g}, not 1")
        object.__setattr__(self, "bounds", (float(vals.min()), float(vals.max())))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.eval(t), dtype=float) * np.ones_like(t)
        return out if out.ndim else float(out)

    def F(self, t):
        """CDF; without a closed form, a cumulative Gauss-Legendre table is used."""
        if self.cdf is not None:
            return self.cdf(np.asarray(t, dtype=float))
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        edges, cum = self._cdf_table
        i = np.minimum((t * (edges.size - 1)).astype(int), edges.size - 2)
        return cum[i] + _gauss_integral(self.eval, edges[i], t)

    @cached_property
    def _cdf_table(self):
        edges = np.linspace(0.0, 1.0, CDF_CELLS + 1)
        cells = _gauss_integral(self.eval, edges[:-1], edges[1:])
        return edges, np.concatenate([[0.0], np.cumsum(cells)])


CDF_CELLS = 1024
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _gauss_integral(f, a, b):
    """16-point Gauss-Legendre integral of f over each [a_i, b_i]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = (b - a) / 2
    nodes = (a + half)[..., None] + half[..., None] * _GL_X
    vals = np.asarray(f(nodes), dtype=float) * np.ones_like(nodes)
    return half * (vals @ _GL_W)


def uniform_density() -> DensitySpec:
    return DensitySpec(
        lambda t: np.ones_like(np.asarray(t, dtype=float)),
        cdf=lambda t: np.clip(t, 0.0, 1.0),
        inv_cdf=lambda u: np.asarray(u, dtype=float),
        label="uniform",
    )


def power_density(lam: float) -> DensitySpec:
    """``f*_lam(t) = ((lam + 2) / 3) t**((lam - 1) / 3)``, optimal for alpha ~ t**(lam-1)."""
    if lam < 1:
        raise DomainError("power density needs lam >= 1 (bounded density)")
    a = (lam - 1.0) / 3.0
    return DensitySpec(
        lambda t: (a + 1.0) * np.asarray(t, dtype=float) ** a,
        cdf=lambda t: np.clip(t, 0.0, 1.0) ** (a + 1.0),
        inv_cdf=lambda u: np.asarray(u, dtype=float) ** (1.0 / (a + 1.0)),
        label=f"power(lam={lam:g})",
        allow_zero_at_origin=lam > 1,
    )


@dataclass(frozen=True)
class Design:
    points: np.ndarray
    provenance: str = "custom"
    density: DensitySpec | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise DomainError("design needs a nonempty 1-d array of points")
        if p.min() < 0 or p.max() > 1:
            raise DomainError("design points must lie in [0, 1]")
        if np.any(np.diff(p) <= 0):
            raise DomainError("design points must be strictly increasing")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    @property
    def n(self) -> int:
        return self.points.size

    def f_at_points(self) -> np.ndarray:
        """Density values used by the trapezoid weights (1 when no density)."""
        if self.density is None:
            return np.ones(self.n)
        return np.asarray(self.density(self.points), dtype=float)

    def __len__(self):
        return self.n


def _bisect_inverse(F, targets, tol=1e-12, max_iter=200):
    lo = np.zeros_like(targets)
    hi = np.ones_like(targets)
    for _ in range(max_iter):
        mid = (lo + hi) / 2
        below = np.asarray(F(mid)) < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo < 1e-15):
            break
    t = (lo + hi) / 2
    if np.max(np.abs(np.asarray(F(t)) - targets)) > tol:
        raise InvalidDensity("CDF inversion did not reach the requested tolerance")
    return t


def regular_design(f: DensitySpec, n: int) -> Design:
    """Points ``F^{-1}(i/n)``, i = 1..n."""
    if n < 2:
        raise DomainError("regular design needs n >= 2")
    u = np.arange(1, n + 1) / n
    if f.inv_cdf is not None:
        t = np.asarray(f.inv_cdf(u), dtype=float)
    else:
        t = _bisect_inverse(f.F, u)
    t[-1] = 1.0
    return Design(t, provenance=f"regular({f.label})", density=f)


def uniform_design(n: int) -> Design:
    return regular_design(uniform_density(), n)


def midpoint_design(n: int) -> Design:
    """Points ``(i - 0.5) / n`` with the uniform density attached."""
    if n < 1:
        raise DomainError("midpoint design needs n >= 1")
    return Design((np.arange(1, n + 1) - 0.5) / n, provenance="midpoint", density=uniform_density())


def optimal_power_design(lam: float, n: int) -> Design:
    """``t_i = (i/n)**(3/(lam+2))``, the regular design of the optimal power density."""
    d = regular_design(power_density(lam), n)
    return Design(d.points, provenance=f"optimal-power(lam={lam:g})", density=d.density)


def optimal_design_density(alpha: Callable, w: Callable | None = None, power: float | None = None) -> DensitySpec:
    """Density proportional to ``(alpha * w)**(1/3)``.

    Pass ``power=lam`` when alpha is proportional to ``t**(lam - 1)`` and w is
    uniform to get the closed form (with closed-form CDF and inverse).
    """
    if power is not None:
        return power_density(power)
    if w is None:
        w = lambda t: np.ones_like(np.asarray(t, dtype=float))

    def root(t):
        t = np.asarray(t, dtype=float)
        return np.cbrt(np.asarray(alpha(t), dtype=float) * np.asarray(w(t), dtype=float) * np.ones_like(t))

    c = integrate_unit(lambda t: float(root(t)))
    if not np.isfinite(c) or c <= 0:
        raise InvalidDensity("normalizer of the optimal density is not finite and positive")
    return DensitySpec(lambda t: root(t) / c, label="optimal", allow_zero_at_origin=True)


def window_points(d: Design, x: float, h: float) -> tuple[np.ndarray, int]:
    """Indices of design points in the closed window ``[x - h, x + h]``."""
    if not 0 < h:
        raise DomainError("bandwidth must be positive")
    idx = np.flatnonzero(in_window(d.points, x, h))
    return idx, idx.size


# slack so that points like i/n sitting exactly on x +- h are not lost to rounding
WINDOW_EPS = 1e-12


def in_window(t, x, h):
    return np.abs(np.asarray(x) - np.asarray(t)) <= h + WINDOW_EPS
