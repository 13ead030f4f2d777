"""Kernel regression with repeated measurements under correlated errors.

Trapezoidal and Gasser-Mueller estimators, their exact and asymptotic IMSE,
optimal bandwidths and sampling designs, Gaussian error simulation and
covariance fitting.
"""

from .covariance import CovModel, cholesky_factor, cov_eval, cov_matrix, jump_alpha
from .covfit import (
    FitResult,
    Schedule,
    anneal_fit,
    empirical_cov,
    median_fit,
    plugin_design_experiment,
    q_criterion,
)
from .design import (
    Design,
    DensitySpec,
    midpoint_design,
    optimal_design_density,
    optimal_power_design,
    power_density,
    regular_design,
    uniform_density,
    uniform_design,
    window_points,
)
from .errors import *  # noqa: F401,F403
from .estimators import WeightVector, boundary_correct, estimate_curve, gm_weights, trap_weights, weight_matrix
from .kernels import QUADRATIC, TRIWEIGHT, Kernel, KernelConstants, eval_kernel, get_kernel, kernel_cdf_integral, kernel_constants, phi
from .risk import (
    BandwidthSearch,
    RiskEngine,
    RiskReport,
    asymptotic_imse,
    asymptotic_optimal_bandwidth,
    asymptotic_rimse,
    bandwidth_grid,
    exact_imse,
    minimax_psi,
    normality_check,
    optimal_bandwidth_grid,
    pointwise_risk,
    sigma2_xh,
)
from .simulation import RegressionFunction, SampleSet, simulate, ybar

__version__ = "0.1.0"
