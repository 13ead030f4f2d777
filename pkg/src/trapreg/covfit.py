"""Covariance-parameter fitting and the plug-in optimal design experiment.

The generalized OU parameters (sigma2, lam, rho) are fitted by least squares
between the empirical covariance of replicated paths and the model,
minimized with simulated annealing followed by a bounded local polish.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .covariance import CovModel, cov_matrix
from .design import Design, midpoint_design, optimal_power_design, uniform_design
from .errors import DomainError, InsufficientReplicates
from .kernels import QUADRATIC, Kernel
from .risk import RiskEngine
from .simulation import RegressionFunction, SampleSet, simulate

PARAMS = ("sigma2", "lam", "rho")
DEFAULT_BOX = ((1e-4, 10.0), (0.1, 10.0), (0.01, 0.99))


@dataclass(frozen=True)
class Schedule:
    """Annealing schedule. ``t0=None`` starts at the criterion value of the box center."""

    t0: float | None = None
    cooling: float = 0.97
    stages: int = 200
    moves: int = 50
    step: float = 0.05
    polish: bool = True


@dataclass(frozen=True)
class FitResult:
    sigma2_hat: float
    lambda_hat: float
    rho_hat: float
    q_value: float
    evaluations: int
    seed: int | None = None

    @property
    def params(self) -> np.ndarray:
        return np.array([self.sigma2_hat, self.lambda_hat, self.rho_hat])

    def model(self) -> CovModel:
        return CovModel.gen_ou(self.sigma2_hat, self.lambda_hat, self.rho_hat)


def empirical_cov(s: SampleSet | np.ndarray) -> np.ndarray:
    """Unbiased sample covariance of the columns (replicates in rows)."""
    y = s.y if hasattr(s, "y") else np.atleast_2d(np.asarray(s, dtype=float))
    if y.shape[0] < 2:
        raise InsufficientReplicates("the empirical covariance needs at least two replicates")
    return np.atleast_2d(np.cov(y, rowvar=False, ddof=1))


def q_criterion(Rhat: np.ndarray, model: CovModel, d: Design | np.ndarray) -> float:
    """Mean squared difference between ``Rhat`` and the model over the design grid."""
    S = cov_matrix(model, d)
    if Rhat.shape != S.shape:
        raise DomainError(f"Rhat is {Rhat.shape}, design gives {S.shape}")
    return float(np.mean((Rhat - S) ** 2))


class _GenOUCriterion:
    """Q for the generalized OU family with the |s^lam - t^lam| table cached per call."""

    def __init__(self, Rhat, points):
        self.Rhat = Rhat
        self.t = np.asarray(points, dtype=float)
        self.calls = 0

    def __call__(self, p) -> float:
        self.calls += 1
        s2, lam, rho = p
        tl = self.t**lam
        S = s2 * np.exp(np.log(rho) / lam * np.abs(tl[:, None] - tl[None, :]))
        return float(np.mean((self.Rhat - S) ** 2))


def _reflect(x, lo, hi):
    width = hi - lo
    y = np.mod(x - lo, 2 * width)
    return lo + np.where(y > width, 2 * width - y, y)


def anneal_fit(
    s: SampleSet | None = None,
    box=DEFAULT_BOX,
    schedule: Schedule = Schedule(),
    seed: int = 0,
    Rhat: np.ndarray | None = None,
    design: Design | None = None,
) -> FitResult:
    """Fit (sigma2, lam, rho) by simulated annealing on Q.

    Gaussian proposals scaled to ``step`` of each box side, reflected at the
    bounds; Metropolis acceptance; geometric cooling. The best point ever
    visited is returned, optionally polished by L-BFGS-B inside the box.
    Pass ``Rhat`` and ``design`` instead of a SampleSet to fit a given matrix.
    """
    if Rhat is None:
        if s is None:
            raise DomainError("need a SampleSet or Rhat")
        Rhat, design = empirical_cov(s), s.design
    elif design is None:
        raise DomainError("Rhat needs a design")
    box = np.asarray(box, dtype=float)
    lo, hi = box[:, 0], box[:, 1]
    if np.any(hi <= lo):
        raise DomainError("parameter box is empty")
    Q = _GenOUCriterion(Rhat, design.points)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))

    x = (lo + hi) / 2
    qx = Q(x)
    best, qbest = x.copy(), qx
    T = schedule.t0 if schedule.t0 is not None else max(qx, 1e-12)
    scale = schedule.step * (hi - lo)
    for _ in range(schedule.stages):
        steps = rng.standard_normal((schedule.moves, 3)) * scale
        u = rng.random(schedule.moves)
        for j in range(schedule.moves):
            y = _reflect(x + steps[j], lo, hi)
            qy = Q(y)
            if qy <= qx or u[j] < math.exp(-(qy - qx) / T):
                x, qx = y, qy
                if qx < qbest:
                    best, qbest = x.copy(), qx
        T *= schedule.cooling

    if schedule.polish:
        res = optimize.minimize(Q, best, method="L-BFGS-B", bounds=list(zip(lo, hi)))
        if res.fun < qbest:
            best, qbest = np.clip(res.x, lo, hi), float(res.fun)
    return FitResult(*map(float, best), q_value=float(qbest), evaluations=Q.calls, seed=seed)


def median_fit(fits: list[FitResult], reference: SampleSet | None = None) -> FitResult:
    """Componentwise median; Q is recomputed at the median on ``reference`` if given."""
    if not fits:
        raise DomainError("no fits to summarize")
    med = np.median(np.array([f.params for f in fits]), axis=0)
    q = float("nan")
    if reference is not None:
        q = _GenOUCriterion(empirical_cov(reference), reference.design.points)(med)
    return FitResult(*map(float, med), q_value=q, evaluations=sum(f.evaluations for f in fits), seed=None)


def write_fits_csv(path, fits: list[FitResult]) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["seed", "sigma2_hat", "lambda_hat", "rho_hat", "q_value"])
        for f in fits:
            out.writerow([f.seed, repr(f.sigma2_hat), repr(f.lambda_hat), repr(f.rho_hat), repr(f.q_value)])


def replicate_fits(
    model: CovModel,
    d: Design,
    m: int,
    replications: int,
    seed: int,
    g: RegressionFunction | None = None,
    box=DEFAULT_BOX,
    schedule: Schedule = Schedule(),
    threads: int = 1,
) -> list[FitResult]:
    """Fit ``replications`` independent data sets; seeds derive from ``seed``."""
    g = g or RegressionFunction.cubic_growth()
    children = np.random.SeedSequence(seed).generate_state(2 * replications, dtype=np.uint64).reshape(-1, 2)
    # designs carry density closures, so workers get the bare points
    jobs = [(model, np.asarray(d.points), g, m, int(a), int(b), box, schedule) for a, b in children]
    if threads > 1:
        # the annealing loop is interpreter-bound, so workers are processes
        with ProcessPoolExecutor(threads) as pool:
            return list(pool.map(_fit_job, jobs))
    return [_fit_job(j) for j in jobs]


def _fit_job(job) -> FitResult:
    model, points, g, m, data_seed, fit_seed, box, schedule = job
    return anneal_fit(simulate(model, Design(points), g, m, data_seed), box, schedule, fit_seed)


@dataclass(frozen=True)
class ReductionReport:
    n: int
    m: int
    h: float
    imse_unif: float
    imse_opt: float
    imse_opt_hat: float
    lambda_hat: float
    fit: FitResult | None = field(default=None, repr=False)

    @property
    def rimse(self) -> float:
        return (self.imse_unif - self.imse_opt) / self.imse_unif

    @property
    def rimse_hat(self) -> float:
        return (self.imse_unif - self.imse_opt_hat) / self.imse_unif

    def row(self) -> dict:
        return {
            "m": self.m,
            "IMSE_unif": self.imse_unif,
            "IMSE_opt": self.imse_opt,
            "rIMSE_lambda": self.rimse,
            "IMSE_opt_hat": self.imse_opt_hat,
            "rIMSE_lambda_hat": self.rimse_hat,
            "lambda_hat": self.lambda_hat,
        }


def design_imse(
    model: CovModel,
    d: Design,
    m: int,
    h: float,
    g: RegressionFunction | None = None,
    k: Kernel = QUADRATIC,
    boundary: str = "renormalize-edge",
) -> float:
    """Exact trapezoid IMSE on ``d`` using the design's own density in the weights.

    Windows with fewer than two points contribute an estimate of zero.
    """
    g = g or RegressionFunction.cubic_growth()
    return RiskEngine("trapezoid", d, g, model, k, boundary=boundary, empty="zero").report(h, m).imse


def plugin_design_experiment(
    n: int,
    m: int,
    model: CovModel,
    h: float = 0.123,
    seed: int = 0,
    replications: int = 100,
    g: RegressionFunction | None = None,
    k: Kernel = QUADRATIC,
    uniform: str = "midpoint",
    boundary: str = "renormalize-edge",
    box=DEFAULT_BOX,
    schedule: Schedule = Schedule(),
    threads: int = 1,
    fits: list[FitResult] | None = None,
) -> ReductionReport:
    """IMSE of the trapezoid estimator under uniform, optimal and plug-in designs.

    ``uniform`` picks the baseline design: ``"midpoint"`` for (i - 0.5)/n or
    ``"regular"`` for i/n. The plug-in design uses the median of
    ``replications`` annealed fits on uniform-design data (pass ``fits`` to
    reuse earlier fits); ``replications=0`` skips it.
    """
    if model.family != "gen-ou":
        raise DomainError("the plug-in experiment needs a gen-ou model")
    g = g or RegressionFunction.cubic_growth()
    du = midpoint_design(n) if uniform == "midpoint" else uniform_design(n)
    do = optimal_power_design(model.lam, n)
    iu = design_imse(model, du, m, h, g, k, boundary)
    io = design_imse(model, do, m, h, g, k, boundary)
    fit = None
    io_hat = lam_hat = float("nan")
    if fits is None and replications > 0:
        if m < 2:
            raise InsufficientReplicates("fitting the covariance needs m >= 2")
        fits = replicate_fits(model, du, m, replications, seed, g, box, schedule, threads)
    if fits:
        fit = median_fit(fits)
        lam_hat = fit.lambda_hat
        io_hat = design_imse(model, optimal_power_design(max(lam_hat, 1.0), n), m, h, g, k, boundary)
    return ReductionReport(n, m, h, iu, io, io_hat, lam_hat, fit)


def write_reduction_csv(path, reports: list[ReductionReport]) -> None:
    with open(path, "w", newline="") as fh:
        out = None
        for r in reports:
            row = r.row()
            if out is None:
                out = csv.DictWriter(fh, fieldnames=list(row))
                out.writeheader()
            out.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
