# %% [markdown]
# Exact risk of a linear smoother and the bandwidth that minimises it.
# No simulation is needed: bias is w.g - g(x) and variance is w'Sigma w / m.

# %%
import numpy as np

from trapreg import (
    QUADRATIC,
    CovModel,
    RegressionFunction,
    RiskEngine,
    asymptotic_imse,
    asymptotic_optimal_bandwidth,
    bandwidth_grid,
    midpoint_design,
)

g = RegressionFunction.cubic_growth()
d = midpoint_design(20)
model = CovModel.wiener(1.0)

# %%
eng = RiskEngine("gm", d, g, model)
for h in (0.2, 0.3, 0.4):
    r = eng.report(h, m=5)
    print(f"h={h}: Ibias2={r.ibias2:.3e} Ivar={r.ivar:.3e} IMSE={r.imse:.3e}")

# %%
# more units per curve means less variance, so the best h drops
for m in (5, 15, 30):
    s = eng.search(m, bandwidth_grid(0.09, 0.5, 0.005))
    h_star = asymptotic_optimal_bandwidth(model, QUADRATIC, g, None, m)
    print(f"m={m}: exact argmin {s.h_opt:.3f}, asymptotic h* {h_star:.3f}")

# %%
# the asymptotic formula against the exact risk for a denser design
d100 = midpoint_design(100)
exact = RiskEngine("trapezoid", d100, g, model).report(0.1, 20).imse
approx = asymptotic_imse(model, None, QUADRATIC, g, None, 100, 20, 0.1)
print(f"n=100, m=20, h=0.1: exact {exact:.4e}, leading order {approx:.4e}")

# %%
# the trapezoid risk is a sawtooth in h: its last window point changes
# from half to full weight whenever another point enters the window
tr = RiskEngine("trapezoid", d, g, model)
hs = np.arange(0.26, 0.30, 0.004)
print(np.round([tr.report(h, 15).imse * 1e2 for h in hs], 4))
