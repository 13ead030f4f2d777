"""Small fixed-rule quadrature helpers shared by the numerical modules."""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy import integrate


def simpson_rule(a: float, b: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Simpson on [a, b].

    ``panels`` is rounded up to the next even number.
    """
    panels = int(panels) + (int(panels) % 2)
    x = np.linspace(a, b, panels + 1)
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (b - a) / (3.0 * panels)
    return x, w


def simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, panels: int) -> float:
    x, w = simpson_rule(a, b, panels)
    return float(w @ f(x))


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    """Composite-trapezoid weights for an increasing, possibly uneven grid."""
    x = np.asarray(x, dtype=float)
    if x.size == 1:
        return np.ones(1)
    d = np.diff(x)
    w = np.zeros_like(x)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


def integrate_unit(f: Callable[[float], float], tol: float = 1e-12) -> float:
    """Adaptive integral of a scalar function over [0, 1].

    Tolerates integrable endpoint singularities such as t**(-1/3).
    """
    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=tol, epsrel=tol, limit=400)
    return float(val)
