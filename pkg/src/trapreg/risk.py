"""Exact and asymptotic risk of the kernel estimators.

Exact risk treats the estimator as the linear smoother it is: for weights w
at x, bias = w.g(t) - g(x) and variance = w' Sigma w / m. IMSE integrates
both against a weight density over an x-grid with trapezoid weights.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .covariance import CovModel, cov_eval, cov_matrix, jump_alpha
from .design import Design, DensitySpec
from .errors import DegenerateCurvature, DomainError, EmptyWindow
from .estimators import WeightVector, weight_matrix
from .kernels import Kernel, QUADRATIC, phi
from .quadrature import integrate_unit, simpson_rule, trapezoid_weights
from .simulation import RegressionFunction, simulate

DEFAULT_X_POINTS = 201
# argmin search default; the step matches the resolution of reported bandwidths
DEFAULT_H_GRID = (0.09, 0.5, 0.001)
EMPTY_POLICIES = ("raise", "skip", "zero")
MAX_SKIPPED = 0.05


def default_x_grid(points: int = DEFAULT_X_POINTS) -> np.ndarray:
    return np.linspace(0.0, 1.0, points)


def bandwidth_grid(lo: float = DEFAULT_H_GRID[0], hi: float = DEFAULT_H_GRID[1], step: float = DEFAULT_H_GRID[2]) -> np.ndarray:
    count = int(round((hi - lo) / step)) + 1
    return np.round(lo + step * np.arange(count), 12)


def _uniform(t):
    return np.ones_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class RiskReport:
    h: float
    ibias2: float
    ivar: float
    n: int
    m: int
    estimator: str
    w_density: str = "uniform"
    x_points: int = DEFAULT_X_POINTS
    skipped: int = 0

    @property
    def imse(self) -> float:
        return self.ibias2 + self.ivar

    def row(self, model: CovModel | None = None, h_opt: bool = False) -> dict:
        params = model.to_dict() if model else {}
        return {
            "estimator": self.estimator,
            "model": params.pop("family", ""),
            "params": json.dumps(params, sort_keys=True),
            "n": self.n,
            "m": self.m,
            "h": repr(self.h),
            "Ibias2": repr(self.ibias2),
            "Ivar": repr(self.ivar),
            "IMSE": repr(self.imse),
            "h_opt_flag": int(h_opt),
        }


@dataclass(frozen=True)
class BandwidthSearch:
    grid: np.ndarray
    reports: list[RiskReport] = field(repr=False)

    @property
    def index(self) -> int:
        # np.argmin keeps the first minimum, i.e. the smallest h on ties
        return int(np.argmin([r.imse for r in self.reports]))

    @property
    def h_opt(self) -> float:
        return float(self.grid[self.index])

    @property
    def best(self) -> RiskReport:
        return self.reports[self.index]


def write_risk_csv(path, reports: Sequence[RiskReport], model: CovModel | None = None, h_opt: float | None = None):
    with open(path, "w", newline="") as fh:
        out = None
        for r in reports:
            row = r.row(model, h_opt is not None and r.h == h_opt)
            if out is None:
                out = csv.DictWriter(fh, fieldnames=list(row))
                out.writeheader()
            out.writerow(row)


def pointwise_risk(wv: WeightVector, g: RegressionFunction, model: CovModel, m: int, design: Design | None = None):
    """Exact (bias, variance) of a linear smoother at its evaluation point."""
    d = design or wv.design
    if d is None:
        raise DomainError("weights carry no design; pass design=")
    w = wv.weights
    bias = float(w @ g(d.points) - g(wv.x))
    var = float(w @ cov_matrix(model, d) @ w) / m
    return bias, var


class RiskEngine:
    """Exact IMSE for one (design, estimator, model) across many bandwidths.

    Holds the covariance matrix and quadrature nodes so bandwidth searches do
    not rebuild them.
    """

    def __init__(
        self,
        estimator: str,
        d: Design,
        g: RegressionFunction,
        model: CovModel,
        k: Kernel = QUADRATIC,
        f: DensitySpec | None = None,
        w_density: Callable | None = None,
        x_grid=None,
        boundary: str = "renormalize-edge",
        empty: str = "raise",
    ):
        if empty not in EMPTY_POLICIES:
            raise DomainError(f"empty-window policy must be one of {EMPTY_POLICIES}")
        self.estimator, self.d, self.g, self.model, self.k, self.f = estimator, d, g, model, k, f
        self.boundary, self.empty = boundary, empty
        self.xs = default_x_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
        if self.xs.min() < 0 or self.xs.max() > 1:
            raise DomainError("x-grid must lie in [0, 1]")
        wfun = w_density or _uniform
        self.w_label = "uniform" if w_density is None else getattr(w_density, "label", "custom")
        self.qw = trapezoid_weights(self.xs) * np.asarray(wfun(self.xs), dtype=float)
        self.Sigma = cov_matrix(model, d)
        self.gt = np.asarray(g(d.points), dtype=float)
        self.gx = np.asarray(g(self.xs), dtype=float)

    def pointwise(self, h: float):
        """Squared bias, variance times m, and validity at every x-grid point."""
        W, _, valid = weight_matrix(self.d, self.xs, h, self.estimator, self.k, self.f, self.boundary)
        bias2 = (W @ self.gt - self.gx) ** 2
        var_m = np.einsum("ij,jk,ik->i", W, self.Sigma, W)
        return bias2, var_m, valid

    def report(self, h: float, m: int) -> RiskReport:
        if m < 1:
            raise DomainError("m must be at least 1")
        bias2, var_m, valid = self.pointwise(h)
        qw = self.qw
        skipped = int((~valid).sum())
        if self.empty != "zero" and skipped:
            if self.empty == "raise" and skipped > MAX_SKIPPED * len(self.xs):
                raise EmptyWindow(
                    f"{skipped} of {len(self.xs)} x-grid points have an undefined estimate at h={h}"
                )
            qw = np.where(valid, qw, 0.0)
        return RiskReport(
            h=float(h),
            ibias2=float(qw @ bias2),
            ivar=float(qw @ var_m) / m,
            n=self.d.n,
            m=m,
            estimator=self.estimator,
            w_density=self.w_label,
            x_points=len(self.xs),
            skipped=skipped,
        )

    def search(self, m: int, grid=None) -> BandwidthSearch:
        grid = bandwidth_grid() if grid is None else np.sort(np.asarray(grid, dtype=float))
        if grid.size == 0:
            raise DomainError("bandwidth grid is empty")
        return BandwidthSearch(grid, [self.report(h, m) for h in grid])


def exact_imse(estimator, d, f, k, g, model, m, h, w_density=None, x_grid=None, boundary="renormalize-edge", empty="raise") -> RiskReport:
    return RiskEngine(estimator, d, g, model, k, f, w_density, x_grid, boundary, empty).report(h, m)


def optimal_bandwidth_grid(estimator, d, f, k, g, model, m, grid=None, w_density=None, x_grid=None, boundary="renormalize-edge", empty="raise") -> BandwidthSearch:
    return RiskEngine(estimator, d, g, model, k, f, w_density, x_grid, boundary, empty).search(m, grid)


# ---------------------------------------------------------------- asymptotics


def _w(w_density):
    return w_density or _uniform


def curvature_integral(g: RegressionFunction, w_density=None) -> float:
    """``int (g'')**2 w``."""
    w = _w(w_density)
    return integrate_unit(lambda x: float(g.second_derivative(x) ** 2 * w(x)))


def asymptotic_imse(model: CovModel, f: DensitySpec | None, k: Kernel, g: RegressionFunction, w_density, n: int, m: int, h: float) -> float:
    """Leading-order IMSE of the trapezoid estimator."""
    if model.family == "zero":
        raise DomainError("no jump function for the zero covariance")
    w = _w(w_density)
    fd = f if f is not None else _uniform
    B, V, C = k.constants
    floor = integrate_unit(lambda x: float((cov_eval(model, x, x) - h / 2 * jump_alpha(model, x) * C) * w(x)))
    design_term = integrate_unit(lambda x: float(jump_alpha(model, x) / fd(x) ** 2 * w(x)))
    return floor / m + V / (12 * m * n**2 * h) * design_term + h**4 * B**2 / 4 * curvature_integral(g, w_density)


def asymptotic_optimal_bandwidth(model: CovModel, k: Kernel, g: RegressionFunction, w_density, m: int) -> float:
    """``h* = (C_K int(alpha w) / (2 B^2 int(g''^2 w)))**(1/3) m**(-1/3)``."""
    curv = curvature_integral(g, w_density)
    if curv <= 1e-300:
        raise DegenerateCurvature("regression function has zero curvature; the optimal bandwidth is unbounded")
    w = _w(w_density)
    B, _, C = k.constants
    a = integrate_unit(lambda x: float(jump_alpha(model, x) * w(x)))
    return (C * a / (2 * B**2 * curv)) ** (1 / 3) * m ** (-1 / 3)


def asymptotic_rimse(alpha: Callable, w_density=None) -> float:
    """Relative reduction of the design term achieved by the optimal density."""
    w = _w(w_density)
    root = integrate_unit(lambda t: float(np.cbrt(alpha(t) * w(t))))
    full = integrate_unit(lambda t: float(alpha(t) * w(t)))
    return 1.0 - root**3 / full


def minimax_psi(alpha: Callable, w_density, f: Callable) -> float:
    """``Psi(f) = int alpha w / f**2``."""
    w = _w(w_density)
    return integrate_unit(lambda t: float(alpha(t) * w(t) / f(t) ** 2))


def sigma2_xh(model: CovModel, x: float, h: float, k: Kernel = QUADRATIC, panels: int = 800) -> float:
    """``int int phi(s) R(s, t) phi(t) ds dt`` by tensor Simpson over the window."""
    lo, hi = max(0.0, x - h), min(1.0, x + h)
    s, ws = simpson_rule(lo, hi, panels)
    p = phi(x, h, s, k) * ws
    return float(p @ cov_eval(model, s[:, None], s[None, :]) @ p)


# ---------------------------------------------------------------- normality


@dataclass(frozen=True)
class NormalityResult:
    statistic: float
    pvalue: float
    sample_variance: float
    target_variance: float
    replications: int

    @property
    def degenerate(self) -> bool:
        return math.isnan(self.pvalue)


def normality_check(model, d, g, k, f, m, h, x, replications, seed, estimator="trapezoid", boundary="renormalize-edge", threads=1) -> NormalityResult:
    """KS test of ``sqrt(m) (ghat(x) - g(x))`` against ``N(0, R(x, x))``."""
    if not 0 < x < 1:
        raise DomainError("x must be interior")
    if math.sqrt(m) * h**2 > 0.5 or d.n * h**2 < 0.1:
        warnings.warn(f"(n, m, h) = ({d.n}, {m}, {h}) is outside the sqrt(m) h^2 -> 0, n h^2 -> inf regime", stacklevel=2)
    W, _, valid = weight_matrix(d, [x], h, estimator, k, f, boundary)
    if not valid[0]:
        raise EmptyWindow(f"estimate undefined at x={x}")
    w = W[0]
    seeds = np.random.SeedSequence(seed).generate_state(replications, dtype=np.uint64)
    z = np.empty(replications)
    for i, s in enumerate(seeds):
        ys = simulate(model, d, g, m, int(s), threads=threads)
        z[i] = math.sqrt(m) * (w @ ys.y.mean(axis=0) - g(x))
    target = float(cov_eval(model, x, x))
    var = float(z.var(ddof=1)) if replications > 1 else 0.0
    if target <= 0:
        return NormalityResult(float("nan"), float("nan"), var, target, replications)
    res = stats.kstest(z, "norm", args=(0.0, math.sqrt(target)))
    return NormalityResult(float(res.statistic), float(res.pvalue), var, target, replications)
