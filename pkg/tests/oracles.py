"""Independent reference implementations used by the tests.

Each oracle is written directly from a defining formula with plain loops or
brute-force sums and shares no code with the package.
"""

import math

import numpy as np


def quadratic(u):
    return 15 / 16 * (1 - u * u) ** 2 if abs(u) <= 1 else 0.0


def triweight(u):
    return 35 / 32 * (1 - u * u) ** 3 if abs(u) <= 1 else 0.0


def riemann_constants(K, points=1_000_000):
    """B, V and C_K by midpoint Riemann sums; C_K via the sorted-sample identity."""
    du = 2.0 / points
    u = -1 + du * (np.arange(points) + 0.5)
    k = K.vector(u)
    B = float(np.sum(u * u * k) * du)
    V = float(np.sum(k * k) * du)
    # sum_{ij} |u_i - u_j| k_i k_j with u sorted, in O(N) using prefix sums
    w = k * du
    W = np.cumsum(w)
    M = np.cumsum(w * u)
    C = 2.0 * float(np.sum(w * (u * W - M)))
    return B, V, C


quadratic.vector = lambda u: np.where(np.abs(u) <= 1, 15 / 16 * (1 - u * u) ** 2, 0.0)
triweight.vector = lambda u: np.where(np.abs(u) <= 1, 35 / 32 * (1 - u * u) ** 3, 0.0)


def cubic(x):
    return 10 * x**3 - 15 * x**4 + 6 * x**5


def cubic_dd(x):
    return 60 * x - 180 * x**2 + 120 * x**3


def trap_literal(points, fvals, x, h, K=quadratic):
    """Trapezoid estimator weights by expanding its pairwise sum term by term.

    ghat = 1/(2n) sum_{k=1}^{N-1} [(phi/f Y)(t_k) + (phi/f Y)(t_{k+1})]
    over the window points; the coefficient of each Y(t_i) is collected.
    """
    n = len(points)
    window = [i for i in range(n) if abs(x - points[i]) <= h + 1e-12]
    w = [0.0] * n
    for a, b in zip(window[:-1], window[1:]):
        for i in (a, b):
            w[i] += K((x - points[i]) / h) / h / fvals[i] / (2 * n)
    return np.array(w)


def quad_variance(w, points, R, m):
    n = len(points)
    tot = 0.0
    for i in range(n):
        for j in range(n):
            tot += w[i] * w[j] * R(points[i], points[j])
    return tot / m


def wiener(s2=1.0):
    return lambda s, t: s2 * min(s, t)


def ou(s2, lam):
    return lambda s, t: s2 * math.exp(-lam * abs(s - t))
