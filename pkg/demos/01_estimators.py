# %% [markdown]
# Trapezoid and Gasser-Mueller smoothers on replicated curves.
# Each unit observes g on the same design plus a Wiener path; we average
# the m units and smooth the mean.

# %%
import numpy as np

from trapreg import (
    CovModel,
    RegressionFunction,
    estimate_curve,
    gm_weights,
    midpoint_design,
    simulate,
    trap_weights,
)

g = RegressionFunction.cubic_growth()
d = midpoint_design(50)
model = CovModel.wiener(0.5)

# %%
# weights at one point: both are linear in the data
x, h = 0.5, 0.15
wt = trap_weights(d, None, x, h)
wg = gm_weights(d, x, h)
print("window size", wt.n_window)
print("trapezoid mass", round(wt.mass, 5), " GM mass", round(wg.mass, 5))

# %%
# one data set, both estimators on a grid; the noise is a whole path,
# so a single draw can sit visibly above or below g
s = simulate(model, d, g, m=20, seed=1)
grid = np.linspace(0, 1, 11)
for est in ("trapezoid", "gm"):
    ghat, count, edge = estimate_curve(d, s.y.mean(axis=0), grid, h, est)
    print(est.ljust(9), np.round(ghat, 3))
print("g".ljust(9), np.round(g(grid), 3))

# %%
# averaging over many data sets shows the bias; it shrinks with h
for h in (0.25, 0.1):
    total = np.zeros(grid.size)
    for seed in range(100):
        ys = simulate(model, d, g, 20, seed).y.mean(axis=0)
        total += estimate_curve(d, ys, grid, h, "trapezoid")[0]
    print(f"h={h}: max |mean ghat - g| = {np.abs(total / 100 - g(grid)).max():.4f}")
