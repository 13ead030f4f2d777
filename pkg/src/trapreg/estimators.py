"""Trapezoidal and Gasser-Mueller kernel estimators as linear-smoother weights.

Both estimators are ``ghat(x) = sum_i w_i(x) ybar(t_i)`` with weights that do
not depend on the data, so exact risks are linear algebra on the weights.

Boundary modes:

``none``              raw weights
``renormalize``       at x < h or x > 1 - h divide the weights by their sum
``renormalize-edge``  like ``renormalize``, but the trapezoid weights first
                      get the rectangle between the boundary and the outermost
                      design point (mass F(t_1) on the left, 1 - F(t_n) on the
                      right); identical to ``renormalize`` for GM
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .design import Design, DensitySpec, in_window
from .errors import DomainError, EmptyWindow, ZeroMass
from .kernels import Kernel, QUADRATIC

ESTIMATORS = ("trapezoid", "gm")
BOUNDARY_MODES = ("none", "renormalize", "renormalize-edge")
ZERO_MASS = 1e-14


@dataclass(frozen=True, eq=False)
class WeightVector:
    x: float
    h: float
    weights: np.ndarray
    estimator: str
    boundary_mode: str = "none"
    n_window: int = 0
    design: Design | None = field(default=None, repr=False)

    def apply(self, values) -> float:
        return float(self.weights @ np.asarray(values, dtype=float))

    @property
    def mass(self) -> float:
        return float(self.weights.sum())


def _check_h(h):
    if not 0 < h < 1:
        raise DomainError(f"bandwidth must lie in (0, 1), got {h}")


def _density_values(d: Design, f: DensitySpec | None) -> np.ndarray:
    if f is None:
        return d.f_at_points()
    return np.asarray(f(d.points), dtype=float) * np.ones(d.n)


def _cdf(d: Design, f: DensitySpec | None, t):
    f = f if f is not None else d.density
    if f is None:
        return np.asarray(t, dtype=float)
    return np.asarray(f.F(t), dtype=float)


def is_boundary(x, h):
    x = np.asarray(x, dtype=float)
    return (x < h) | (x > 1 - h)


def _trap_matrix(d: Design, xs: np.ndarray, h: float, k: Kernel, fvals: np.ndarray):
    """Raw trapezoid weights; rows with fewer than two window points are zero."""
    t = d.points
    n = d.n
    X = xs[:, None]
    inside = in_window(t[None, :], X, h)
    W = np.where(inside, k((X - t[None, :]) / h) / h / (n * fvals[None, :]), 0.0)
    count = inside.sum(axis=1)
    first = np.argmax(inside, axis=1)
    last = n - 1 - np.argmax(inside[:, ::-1], axis=1)
    ok = count >= 2
    rows = np.arange(len(xs))[ok]
    W[rows, first[ok]] /= 2
    W[rows, last[ok]] /= 2
    W[~ok] = 0.0
    return W, count, first, last


def _gm_matrix(d: Design, xs: np.ndarray, h: float, k: Kernel):
    t = d.points
    cells = np.concatenate([[0.0], (t[:-1] + t[1:]) / 2, [1.0]])
    X = xs[:, None]
    W = k.cdf((X - cells[None, :-1]) / h) - k.cdf((X - cells[None, 1:]) / h)
    count = in_window(t[None, :], X, h).sum(axis=1)
    return W, count


def weight_matrix(
    d: Design,
    xs,
    h: float,
    estimator: str = "trapezoid",
    k: Kernel = QUADRATIC,
    f: DensitySpec | None = None,
    boundary: str = "renormalize-edge",
):
    """Weights for every x in ``xs`` as a (len(xs), n) matrix.

    Returns ``(W, count, valid)``: ``count`` is the number of design points in
    each window, ``valid`` marks rows where the estimate is defined (trapezoid
    needs two window points; any row needs nonzero mass to be renormalized).
    Invalid rows are zero.
    """
    _check_h(h)
    if estimator not in ESTIMATORS:
        raise DomainError(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}")
    if boundary not in BOUNDARY_MODES:
        raise DomainError(f"unknown boundary mode {boundary!r}; choose from {BOUNDARY_MODES}")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if estimator == "gm":
        W, count = _gm_matrix(d, xs, h, k)
        valid = np.ones(len(xs), dtype=bool)
    else:
        fvals = _density_values(d, f)
        W, count, first, last = _trap_matrix(d, xs, h, k, fvals)
        valid = count >= 2
        if boundary == "renormalize-edge":
            t = d.points
            edge = np.asarray(_cdf(d, f, [t[0], t[-1]]), dtype=float)
            left = valid & (xs - h < 0) & (first == 0)
            right = valid & (xs + h > 1) & (last == d.n - 1)
            W[left, 0] += edge[0] * k((xs[left] - t[0]) / h) / h / fvals[0]
            W[right, -1] += (1 - edge[1]) * k((xs[right] - t[-1]) / h) / h / fvals[-1]
    if boundary != "none":
        bd = is_boundary(xs, h)
        mass = W.sum(axis=1)
        dead = bd & (np.abs(mass) <= ZERO_MASS)
        valid &= ~dead
        sel = bd & valid
        W[sel] /= mass[sel, None]
    W[~valid] = 0.0
    return W, count, valid


def trap_weights(d: Design, f: DensitySpec | None, x: float, h: float, k: Kernel = QUADRATIC) -> WeightVector:
    """Trapezoid-rule weights: (1/n) phi/f inside the window, halved at its two ends."""
    W, count, valid = weight_matrix(d, [x], h, "trapezoid", k, f, boundary="none")
    if not valid[0]:
        raise EmptyWindow(f"only {count[0]} design point(s) in [{x - h:.6g}, {x + h:.6g}]")
    return WeightVector(float(x), h, W[0], "trapezoid", "none", int(count[0]), d)


def gm_weights(d: Design, x: float, h: float, k: Kernel = QUADRATIC) -> WeightVector:
    """Kernel mass of ``phi_{x,h}`` over each midpoint cell."""
    W, count, _ = weight_matrix(d, [x], h, "gm", k, boundary="none")
    return WeightVector(float(x), h, W[0], "gm", "none", int(count[0]), d)


def boundary_correct(wv: WeightVector, mode: str = "renormalize", f: DensitySpec | None = None, k: Kernel = QUADRATIC) -> WeightVector:
    """Renormalize weights near the edges; interior x pass through unchanged."""
    if mode not in BOUNDARY_MODES:
        raise DomainError(f"unknown boundary mode {mode!r}")
    if mode == "none" or not is_boundary(wv.x, wv.h):
        return wv
    w = wv.weights.copy()
    if mode == "renormalize-edge" and wv.estimator == "trapezoid" and wv.design is not None:
        d = wv.design
        t = d.points
        fv = _density_values(d, f)
        edge = _cdf(d, f, [t[0], t[-1]])
        if wv.x - wv.h < 0 and w[0] > 0:
            w[0] += edge[0] * k((wv.x - t[0]) / wv.h) / wv.h / fv[0]
        if wv.x + wv.h > 1 and w[-1] > 0:
            w[-1] += (1 - edge[1]) * k((wv.x - t[-1]) / wv.h) / wv.h / fv[-1]
    s = w.sum()
    if abs(s) <= ZERO_MASS:
        raise ZeroMass(f"weight mass {s!r} at x={wv.x} cannot be renormalized")
    return replace(wv, weights=w / s, boundary_mode=mode)


def estimate_curve(
    d: Design,
    ybar,
    grid,
    h: float,
    estimator: str = "gm",
    f: DensitySpec | None = None,
    k: Kernel = QUADRATIC,
    boundary: str = "renormalize-edge",
):
    """Evaluate the estimator on ``grid``; undefined points come back as NaN.

    ``ybar`` may be a vector of column means or a SampleSet. Returns
    ``(ghat, n_window, boundary_flag)``.
    """
    if hasattr(ybar, "y"):
        ybar = ybar.y.mean(axis=0)
    grid = np.asarray(grid, dtype=float)
    W, count, valid = weight_matrix(d, grid, h, estimator, k, f, boundary)
    ghat = W @ np.asarray(ybar, dtype=float)
    ghat[~valid] = np.nan
    return ghat, count, is_boundary(grid, h)


def write_curve_csv(path, grid, ghat, n_window, boundary_flag, extra: dict | None = None) -> None:
    """Columns x, ghat, n_window, boundary_flag (plus any extra named columns)."""
    extra = extra or {}
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["x", "ghat", "n_window", "boundary_flag", *extra])
        for i, x in enumerate(grid):
            out.writerow([repr(float(x)), repr(float(ghat[i])), int(n_window[i]), int(bool(boundary_flag[i])),
                          *(repr(float(v[i])) for v in extra.values())])
