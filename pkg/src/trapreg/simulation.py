"""Replicated noisy observations Y_j(t_i) = g(t_i) + eps_j(t_i) with Gaussian eps."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .covariance import CovModel, cholesky_factor, cov_matrix
from .design import Design
from .errors import DomainError

# rows per RNG substream; fixed so the output never depends on the thread count
BLOCK_ROWS = 1024


@dataclass(frozen=True, eq=False)
class RegressionFunction:
    """Polynomial regression function; ``coeffs`` in ascending powers of x."""

    family: str
    coeffs: tuple[float, ...]

    @classmethod
    def cubic_growth(cls):
        return cls("cubic-growth", (0.0, 0.0, 0.0, 10.0, -15.0, 6.0))

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]):
        return cls("polynomial", tuple(float(c) for c in coeffs))

    @classmethod
    def constant(cls, c: float):
        return cls.polynomial([c])

    @property
    def poly(self) -> Polynomial:
        return Polynomial(self.coeffs)

    def __call__(self, x):
        out = self.poly(np.asarray(x, dtype=float))
        return out if np.ndim(out) else float(out)

    def second_derivative(self, x):
        out = self.poly.deriv(2)(np.asarray(x, dtype=float))
        return out if np.ndim(out) else float(out)

    def to_dict(self):
        if self.family == "cubic-growth":
            return {"family": "cubic-growth"}
        return {"family": "polynomial", "coeffs": list(self.coeffs)}

    @classmethod
    def from_dict(cls, d):
        if d.get("family", "cubic-growth") == "cubic-growth":
            return cls.cubic_growth()
        return cls.polynomial(d["coeffs"])


@dataclass(frozen=True, eq=False)
class SampleSet:
    design: Design
    y: np.ndarray
    seed: int | None = None
    model: CovModel | None = None
    g: RegressionFunction | None = field(default=None, repr=False)

    def __post_init__(self):
        y = np.atleast_2d(np.asarray(self.y, dtype=float))
        if y.shape[1] != self.design.n:
            raise DomainError(f"observations have {y.shape[1]} columns for a design of {self.design.n} points")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)

    @property
    def m(self) -> int:
        return self.y.shape[0]

    @property
    def n(self) -> int:
        return self.design.n


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def simulate(model: CovModel, d: Design, g: RegressionFunction, m: int, seed: int, threads: int = 1) -> SampleSet:
    """m independent rows ``g(t) + L z`` with ``L L^T = R(t_i, t_j)``."""
    if m < 1:
        raise DomainError("need at least one replicate")
    L = cholesky_factor(cov_matrix(model, d))
    mean = np.asarray(g(d.points), dtype=float)
    n = d.n
    starts = range(0, m, BLOCK_ROWS)

    def block(start):
        rows = min(BLOCK_ROWS, m - start)
        z = _block_rng(seed, start // BLOCK_ROWS).standard_normal((rows, n))
        return mean + z @ L.T

    if threads > 1 and m > BLOCK_ROWS:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(block, starts))
    else:
        parts = [block(s) for s in starts]
    return SampleSet(d, np.vstack(parts), seed=seed, model=model, g=g)


def ybar(s: SampleSet) -> np.ndarray:
    return s.y.mean(axis=0)


def write_samples_csv(s: SampleSet, path) -> None:
    """One row per replicate under a header of design points."""
    meta = {"seed": s.seed, "model": s.model.to_dict() if s.model else None, "provenance": s.design.provenance}
    header = ",".join(repr(float(t)) for t in s.design.points)
    with open(path, "w") as fh:
        fh.write("# " + json.dumps(meta) + "\n")
        fh.write(header + "\n")
        np.savetxt(fh, s.y, delimiter=",", fmt="%.17g")


def read_samples_csv(path) -> SampleSet:
    lines = Path(path).read_text().splitlines()
    meta = {}
    if lines and lines[0].startswith("#"):
        meta = json.loads(lines[0][1:])
        lines = lines[1:]
    points = np.array([float(v) for v in lines[0].split(",")])
    y = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:] if ln.strip()])
    model = CovModel(**meta["model"]) if meta.get("model") else None
    d = Design(points, provenance=meta.get("provenance", "csv"))
    return SampleSet(d, y, seed=meta.get("seed"), model=model)
