"""JSON experiment configuration.

Example::

    {
      "estimator": "trapezoid",
      "kernel": "quadratic",
      "covariance": {"family": "wiener", "sigma2": 0.5},
      "design": {"kind": "midpoint"},
      "g": {"family": "cubic-growth"},
      "n": 100,
      "m": 5,
      "bandwidth": 0.1,
      "seed": 7
    }

``bandwidth`` is a number, a list of numbers, or ``{"lo": .., "hi": .., "step": ..}``.
``design.kind`` is ``midpoint``, ``uniform`` (points i/n), ``optimal-power``
(needs ``lam``) or ``optimal`` (density proportional to the cube root of
alpha for the configured covariance).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .covariance import FAMILIES, CovModel, jump_alpha
from .covfit import DEFAULT_BOX, Schedule
from .design import (
    Design,
    midpoint_design,
    optimal_design_density,
    optimal_power_design,
    regular_design,
    uniform_design,
)
from .errors import ConfigError, DomainError, InvalidDensity
from .estimators import BOUNDARY_MODES, ESTIMATORS
from .kernels import get_kernel
from .risk import DEFAULT_H_GRID, DEFAULT_X_POINTS, EMPTY_POLICIES, bandwidth_grid
from .simulation import RegressionFunction

DESIGN_KINDS = ("midpoint", "uniform", "optimal-power", "optimal")


@dataclass
class ExperimentConfig:
    estimator: str = "trapezoid"
    kernel: str = "quadratic"
    covariance: dict = field(default_factory=lambda: {"family": "wiener", "sigma2": 1.0})
    design: dict = field(default_factory=lambda: {"kind": "midpoint"})
    g: dict = field(default_factory=lambda: {"family": "cubic-growth"})
    n: int = 20
    m: int = 5
    bandwidth: float | list | dict = 0.1
    weight_density: str = "uniform"
    x_points: int = DEFAULT_X_POINTS
    boundary: str = "renormalize-edge"
    empty_window: str = "raise"
    replications: int = 100
    seed: int = 0
    threads: int = 1
    out: str | None = None
    box: list = field(default_factory=lambda: [list(b) for b in DEFAULT_BOX])
    schedule: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    # ------------------------------------------------------------ checks
    def validate(self) -> None:
        def need(ok, msg):
            if not ok:
                raise ConfigError(msg)

        need(self.estimator in ESTIMATORS, f"estimator must be one of {ESTIMATORS}, got {self.estimator!r}")
        try:
            get_kernel(self.kernel)
        except DomainError as e:
            raise ConfigError(str(e)) from None
        need(isinstance(self.covariance, dict) and self.covariance.get("family") in FAMILIES,
             f"covariance.family must be one of {FAMILIES}")
        try:
            self.cov_model()
        except (TypeError, DomainError) as e:
            raise ConfigError(f"covariance: {e}") from None
        need(self.design.get("kind") in DESIGN_KINDS, f"design.kind must be one of {DESIGN_KINDS}")
        if self.design["kind"] == "optimal-power":
            need(float(self.design.get("lam", 0)) >= 1, "design.lam must be >= 1 for optimal-power")
        need(self.g.get("family", "cubic-growth") in ("cubic-growth", "polynomial"), "g.family must be cubic-growth or polynomial")
        need(isinstance(self.n, int) and self.n >= 2, "n must be an integer >= 2")
        need(isinstance(self.m, int) and self.m >= 1, "m must be an integer >= 1")
        try:
            hs = self.bandwidths()
        except (TypeError, KeyError, ValueError) as e:
            raise ConfigError(f"bandwidth: {e}") from None
        need(hs.size > 0 and np.all((hs > 0) & (hs < 1)), "every bandwidth must lie strictly between 0 and 1")
        need(self.weight_density == "uniform", "only the uniform weight density is supported in configs")
        need(isinstance(self.x_points, int) and self.x_points >= 3, "x_points must be an integer >= 3")
        need(self.boundary in BOUNDARY_MODES, f"boundary must be one of {BOUNDARY_MODES}")
        need(self.empty_window in EMPTY_POLICIES, f"empty_window must be one of {EMPTY_POLICIES}")
        need(isinstance(self.replications, int) and self.replications >= 1, "replications must be a positive integer")
        need(isinstance(self.seed, int) and 0 <= self.seed < 2**64, "seed must be a non-negative 64-bit integer")
        need(isinstance(self.threads, int) and self.threads >= 1, "threads must be a positive integer")
        box = np.asarray(self.box, dtype=float)
        need(box.shape == (3, 2) and np.all(box[:, 0] < box[:, 1]), "box must be three [lo, hi] pairs with lo < hi")
        try:
            Schedule(**self.schedule)
        except TypeError as e:
            raise ConfigError(f"schedule: {e}") from None

    # ------------------------------------------------------------ builders
    def cov_model(self) -> CovModel:
        return CovModel(**self.covariance)

    def regression(self) -> RegressionFunction:
        return RegressionFunction.from_dict(self.g)

    def kernel_obj(self):
        return get_kernel(self.kernel)

    def bandwidths(self) -> np.ndarray:
        b = self.bandwidth
        if isinstance(b, dict):
            return bandwidth_grid(b.get("lo", DEFAULT_H_GRID[0]), b.get("hi", DEFAULT_H_GRID[1]), b.get("step", DEFAULT_H_GRID[2]))
        return np.atleast_1d(np.asarray(b, dtype=float))

    def build_design(self) -> Design:
        kind = self.design["kind"]
        try:
            if kind == "midpoint":
                return midpoint_design(self.n)
            if kind == "uniform":
                return uniform_design(self.n)
            if kind == "optimal-power":
                return optimal_power_design(float(self.design["lam"]), self.n)
            model = self.cov_model()
            dens = optimal_design_density(lambda t: jump_alpha(model, t))
            return regular_design(dens, self.n)
        except InvalidDensity:
            raise
        except DomainError as e:
            raise ConfigError(f"design: {e}") from None

    def schedule_obj(self) -> Schedule:
        return Schedule(**self.schedule)

    # ------------------------------------------------------------ io
    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        d = self.to_dict()
        d.update({k: v for k, v in kw.items() if v is not None})
        return self.from_dict(d)
