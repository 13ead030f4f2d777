"""Command-line experiment runner.

    trapreg estimate --config cfg.json --out curve.csv
    trapreg repro-table --table 1

Exit codes: 0 ok, 2 bad configuration, 3 numerical failure, 4 degenerate input.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import sys

import numpy as np

from .config import ExperimentConfig
from .covariance import jump_alpha
from .covfit import anneal_fit, median_fit, replicate_fits
from .design import optimal_design_density, power_density, regular_design
from .errors import (
    ConfigError,
    DegenerateCurvature,
    DomainError,
    EmptyWindow,
    InsufficientReplicates,
    InvalidDensity,
    NumericalError,
    ZeroMass,
)
from .estimators import estimate_curve
from .risk import RiskEngine, asymptotic_optimal_bandwidth, asymptotic_rimse
from .simulation import read_samples_csv, simulate
from .tables import TABLE_IDS, repro_table, write_rows_csv

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_DEGENERATE = 0, 2, 3, 4


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _curve_grid(points: int) -> np.ndarray:
    return (np.arange(points) + 0.5) / points


def cmd_estimate(cfg: ExperimentConfig) -> int:
    """Mean of ``replications`` estimated curves on an interior x-grid."""
    d, g, model, k = cfg.build_design(), cfg.regression(), cfg.cov_model(), cfg.kernel_obj()
    h = float(cfg.bandwidths()[0])
    grid = _curve_grid(cfg.x_points)
    seeds = np.random.SeedSequence(cfg.seed).generate_state(cfg.replications, dtype=np.uint64)
    total = np.zeros(grid.size)
    for s in seeds:
        ghat, count, flag = estimate_curve(d, simulate(model, d, g, cfg.m, int(s), threads=cfg.threads), grid, h,
                                           cfg.estimator, k=k, boundary=cfg.boundary)
        total += ghat
    mean = total / len(seeds)
    with _output(cfg.out) as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["x", "ghat_mean", "g", "n_window", "boundary_flag"])
        for i, x in enumerate(grid):
            out.writerow([repr(float(x)), repr(float(mean[i])), repr(float(g(x))), int(count[i]), int(flag[i])])
    return EXIT_OK


def _engine(cfg: ExperimentConfig) -> RiskEngine:
    return RiskEngine(cfg.estimator, cfg.build_design(), cfg.regression(), cfg.cov_model(), cfg.kernel_obj(),
                      x_grid=np.linspace(0, 1, cfg.x_points), boundary=cfg.boundary, empty=cfg.empty_window)


def cmd_risk(cfg: ExperimentConfig) -> int:
    eng = _engine(cfg)
    reports = [eng.report(h, cfg.m) for h in cfg.bandwidths()]
    with _output(cfg.out) as fh:
        _write_reports(fh, reports, cfg, None)
    return EXIT_OK


def cmd_bandwidth_search(cfg: ExperimentConfig) -> int:
    search = _engine(cfg).search(cfg.m, cfg.bandwidths())
    with _output(cfg.out) as fh:
        _write_reports(fh, search.reports, cfg, search.h_opt)
    print(f"h_opt = {search.h_opt!r}  IMSE = {search.best.imse!r}", file=sys.stderr)
    return EXIT_OK


def _write_reports(fh, reports, cfg, h_opt):
    out = None
    model = cfg.cov_model()
    for r in reports:
        row = r.row(model, h_opt is not None and r.h == h_opt)
        if out is None:
            out = csv.DictWriter(fh, fieldnames=list(row), lineterminator="\n")
            out.writeheader()
        out.writerow(row)


def cmd_optimal(cfg: ExperimentConfig) -> int:
    """Asymptotic optimal bandwidth, optimal design density and its points."""
    model, g, k = cfg.cov_model(), cfg.regression(), cfg.kernel_obj()
    alpha = lambda t: jump_alpha(model, t)
    h_star = asymptotic_optimal_bandwidth(model, k, g, None, cfg.m)
    if model.family == "gen-ou":
        dens = power_density(model.lam)
        desc = f"f*(t) = {(model.lam + 2) / 3!r} * t^{(model.lam - 1) / 3!r}"
    elif model.family in ("wiener", "ou"):
        dens = power_density(1.0)
        desc = "f*(t) = 1 (uniform)"
    elif model.family == "scaled-wiener":
        dens = power_density(3.0)
        desc = "f*(t) = (5/3) * t^(2/3)"
    else:
        dens = optimal_design_density(alpha)
        desc = "f*(t) proportional to alpha(t)^(1/3)"
    points = regular_design(dens, cfg.n).points
    rimse = asymptotic_rimse(alpha)
    with _output(cfg.out) as fh:
        print(f"h_star: {h_star!r}", file=fh)
        print(f"f_star: {desc}", file=fh)
        print(f"rIMSE: {rimse!r}", file=fh)
        print("t_star: " + " ".join(repr(float(t)) for t in points), file=fh)
    return EXIT_OK


def cmd_fit_cov(cfg: ExperimentConfig, samples: str | None = None) -> int:
    """Annealed covariance fits on simulated (or supplied) replicated data."""
    if samples:
        s = read_samples_csv(samples)
        fits = [anneal_fit(s, cfg.box, cfg.schedule_obj(), cfg.seed)]
    else:
        fits = replicate_fits(cfg.cov_model(), cfg.build_design(), cfg.m, cfg.replications, cfg.seed,
                              cfg.regression(), cfg.box, cfg.schedule_obj(), cfg.threads)
    med = median_fit(fits)
    with _output(cfg.out) as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["seed", "sigma2_hat", "lambda_hat", "rho_hat", "q_value"])
        for f in fits:
            out.writerow([f.seed, repr(f.sigma2_hat), repr(f.lambda_hat), repr(f.rho_hat), repr(f.q_value)])
    print(f"median: sigma2={med.sigma2_hat!r} lambda={med.lambda_hat!r} rho={med.rho_hat!r}", file=sys.stderr)
    return EXIT_OK


def cmd_repro_table(table: int, seed: int, out: str | None, threads: int, replications: int) -> int:
    kw = {"replications": replications} if table >= 7 else {}
    rows = repro_table(table, seed=seed, threads=threads, **kw)
    with _output(out) as fh:
        write_rows_csv(fh, rows)
    return EXIT_OK


COMMANDS = ("estimate", "risk", "bandwidth-search", "optimal", "fit-cov", "repro-table")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trapreg", description="Kernel regression under correlated errors: experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON experiment config")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output path (default: standard output)")
        sp.add_argument("--threads", type=int)
        sp.add_argument("--n", type=int)
        sp.add_argument("--m", type=int)
        sp.add_argument("--replications", type=int)
        if name == "repro-table":
            sp.add_argument("--table", type=int, required=True, choices=TABLE_IDS)
        if name == "fit-cov":
            sp.add_argument("--samples", help="CSV of replicated observations to fit instead of simulating")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "repro-table":
            reps = args.replications if args.replications is not None else 100
            return cmd_repro_table(args.table, args.seed or 0, args.out, args.threads or 1, reps)
        cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
        cfg = cfg.with_overrides(seed=args.seed, out=args.out, threads=args.threads, n=args.n, m=args.m,
                                 replications=args.replications)
        if args.command == "estimate":
            return cmd_estimate(cfg)
        if args.command == "risk":
            return cmd_risk(cfg)
        if args.command == "bandwidth-search":
            return cmd_bandwidth_search(cfg)
        if args.command == "optimal":
            return cmd_optimal(cfg)
        return cmd_fit_cov(cfg, args.samples)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateCurvature, InsufficientReplicates) as e:
        print(f"degenerate input: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (NumericalError, EmptyWindow, ZeroMass, InvalidDensity) as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
