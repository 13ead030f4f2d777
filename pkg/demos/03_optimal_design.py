# %% [markdown]
# Where to sample. With a nonstationary error process, spending design
# points where the process is rough lowers the variance term. The optimal
# density is proportional to the cube root of the jump function alpha.

# %%
import numpy as np

from trapreg import (
    CovModel,
    asymptotic_rimse,
    jump_alpha,
    midpoint_design,
    optimal_power_design,
    plugin_design_experiment,
)
from trapreg.covfit import Schedule, anneal_fit
from trapreg.covariance import cov_matrix

model = CovModel.gen_ou(0.5, 4.0, 0.5)
alpha = lambda t: jump_alpha(model, t)

# %%
print("asymptotic reduction of the variance term:", round(asymptotic_rimse(alpha), 4))
print("optimal points, n=6:", np.round(optimal_power_design(4.0, 6).points, 3))
print("uniform points, n=6:", np.round(midpoint_design(6).points, 3))

# %%
# exact IMSE at h = 0.123, uniform vs optimal design (no fitting yet)
for n, m in ((20, 5), (30, 10)):
    rep = plugin_design_experiment(n, m, model, replications=0)
    print(f"n={n} m={m}: IMSE uniform {rep.imse_unif:.4f}, optimal {rep.imse_opt:.4f}, "
          f"reduction {100 * rep.rimse:.1f}%")

# %%
# in practice lambda is unknown: fit it from the empirical covariance first
d = midpoint_design(20)
fit = anneal_fit(Rhat=cov_matrix(model, d), design=d, seed=0)
print("noise-free fit:", np.round(fit.params, 4), "Q =", f"{fit.q_value:.1e}")

rep = plugin_design_experiment(20, 5, model, replications=10, schedule=Schedule(stages=60), seed=1)
print(f"plug-in with 10 fits: lambda_hat {rep.lambda_hat:.2f}, reduction {100 * rep.rimse_hat:.1f}%")
