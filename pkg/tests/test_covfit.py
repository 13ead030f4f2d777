import csv

import numpy as np
import pytest

from trapreg.covariance import CovModel, cholesky_factor, cov_matrix
from trapreg.covfit import (
    DEFAULT_BOX,
    FitResult,
    ReductionReport,
    Schedule,
    anneal_fit,
    design_imse,
    empirical_cov,
    median_fit,
    plugin_design_experiment,
    q_criterion,
    replicate_fits,
    write_fits_csv,
    write_reduction_csv,
)
from trapreg.design import Design, midpoint_design, optimal_power_design, uniform_design
from trapreg.errors import DomainError, InsufficientReplicates
from trapreg.simulation import RegressionFunction, SampleSet, simulate

TRUTH = CovModel.gen_ou(0.5, 4.0, 0.5)
G = RegressionFunction.cubic_growth()
QUICK = Schedule(stages=40, moves=20)


def fit(sigma2, lam, rho, q=0.0, seed=0):
    return FitResult(sigma2, lam, rho, q, 1, seed)


class TestEmpiricalCov:
    def test_hand_example(self):
        np.testing.assert_allclose(empirical_cov(np.array([[1.0, 0.0], [0.0, 1.0]])), [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15)

    def test_identical_rows(self):
        assert not empirical_cov(np.tile([1.0, 2.0, 3.0], (4, 1))).any()

    def test_one_replicate(self):
        with pytest.raises(InsufficientReplicates):
            empirical_cov(np.ones((1, 3)))

    def test_monte_carlo(self):
        d = midpoint_design(10)
        s = simulate(CovModel.wiener(1.0), d, G, 100_000, seed=5)
        R = empirical_cov(s)
        assert np.abs(R - cov_matrix(CovModel.wiener(1.0), d)).max() < 0.02
        np.testing.assert_array_equal(R, R.T)

    def test_psd(self):
        s = simulate(TRUTH, midpoint_design(30), G, 5, seed=1)
        R = empirical_cov(s)
        L = cholesky_factor(R)
        np.testing.assert_allclose(L @ L.T, R, atol=1e-9)


class TestQ:
    @pytest.mark.parametrize("model", [CovModel.wiener(), CovModel.ou(2, 3), TRUTH, CovModel.scaled_wiener(), CovModel.zero()])
    def test_perfect_fit(self, model):
        d = midpoint_design(7)
        assert q_criterion(cov_matrix(model, d), model, d) == 0.0

    def test_shift(self):
        d = midpoint_design(9)
        assert q_criterion(cov_matrix(TRUTH, d) + 1.0, TRUTH, d) == pytest.approx(1.0, rel=1e-14)

    def test_hand_sum(self):
        d = Design([0.25, 0.75])
        Rhat = np.array([[0.3, 0.1], [0.1, 0.9]])
        R = lambda s, t: 2.0 * min(s, t)
        terms = [(Rhat[i, j] - R(d.points[i], d.points[j])) ** 2 for i in range(2) for j in range(2)]
        assert q_criterion(Rhat, CovModel.wiener(2.0), d) == pytest.approx(sum(terms) / 4, abs=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            q_criterion(np.eye(3), TRUTH, midpoint_design(4))


class TestAnneal:
    def test_noise_free_oracle(self):
        d = midpoint_design(20)
        res = anneal_fit(Rhat=cov_matrix(TRUTH, d), design=d, seed=3)
        assert res.q_value <= 1e-6
        np.testing.assert_allclose(res.params, [0.5, 4.0, 0.5], rtol=0.02)

    def test_large_sample(self):
        s = simulate(TRUTH, midpoint_design(20), G, 10_000, seed=11)
        res = anneal_fit(s, seed=2)
        assert 3.0 <= res.lambda_hat <= 5.2

    def test_deterministic(self):
        s = simulate(TRUTH, midpoint_design(10), G, 5, seed=4)
        assert anneal_fit(s, schedule=QUICK, seed=7) == anneal_fit(s, schedule=QUICK, seed=7)

    @pytest.mark.parametrize("seed", range(4))
    def test_box_and_start(self, seed):
        s = simulate(TRUTH, midpoint_design(10), G, 3, seed=seed)
        box = ((0.2, 0.4), (5.0, 6.0), (0.6, 0.7))  # truth is outside
        res = anneal_fit(s, box, QUICK, seed)
        lo, hi = np.array(box).T
        assert np.all(res.params >= lo) and np.all(res.params <= hi)
        centre = CovModel.gen_ou(*((lo + hi) / 2))
        assert 0 <= res.q_value <= q_criterion(empirical_cov(s), centre, s.design)

    def test_schedule_counts(self):
        d = midpoint_design(8)
        res = anneal_fit(Rhat=cov_matrix(TRUTH, d), design=d, schedule=Schedule(stages=5, moves=4, polish=False))
        assert res.evaluations == 1 + 5 * 4

    def test_bad_inputs(self):
        d = midpoint_design(5)
        with pytest.raises(DomainError):
            anneal_fit()
        with pytest.raises(DomainError):
            anneal_fit(Rhat=np.eye(5))
        with pytest.raises(DomainError):
            anneal_fit(Rhat=np.eye(5), design=d, box=((1, 1), (1, 2), (0.1, 0.2)))


class TestMedian:
    def test_single(self):
        f = fit(0.5, 4, 0.5)
        m = median_fit([f])
        assert m.params.tolist() == f.params.tolist()

    def test_outlier(self):
        assert median_fit([fit(0.5, 3, 0.5), fit(0.5, 4, 0.5), fit(0.5, 100, 0.5)]).lambda_hat == 4

    def test_reference_q(self):
        s = simulate(TRUTH, midpoint_design(6), G, 20, seed=0)
        m = median_fit([fit(0.5, 4, 0.5)], reference=s)
        assert m.q_value == pytest.approx(q_criterion(empirical_cov(s), TRUTH, s.design), rel=1e-12)

    def test_empty(self):
        with pytest.raises(DomainError):
            median_fit([])


class TestReplicates:
    def test_deterministic_and_threads(self):
        d = midpoint_design(8)
        a = replicate_fits(TRUTH, d, 4, 3, seed=1, schedule=QUICK)
        b = replicate_fits(TRUTH, d, 4, 3, seed=1, schedule=QUICK, threads=2)
        assert a == b and len({f.seed for f in a}) == 3

    def test_fits_csv(self, tmp_path):
        path = tmp_path / "fits.csv"
        fits = [fit(0.5, 4, 0.5, 1e-3, 9), fit(0.25, 3.5, 0.4, 2e-3, 10)]
        write_fits_csv(path, fits)
        rows = list(csv.DictReader(open(path)))
        assert list(rows[0]) == ["seed", "sigma2_hat", "lambda_hat", "rho_hat", "q_value"]
        assert float(rows[1]["lambda_hat"]) == 3.5


class TestPluginDesign:
    def test_stationary_zero(self):
        model = CovModel.gen_ou(0.5, 1.0, 0.5)
        rep = plugin_design_experiment(20, 5, model, replications=0, uniform="regular")
        assert rep.rimse == pytest.approx(0.0, abs=1e-12)
        mid = plugin_design_experiment(20, 5, model, replications=0)
        assert abs(mid.rimse) < 1e-3

    @pytest.mark.parametrize("lam", [1.0, 2.0, 4.0, 8.0])
    @pytest.mark.parametrize("n, m", [(20, 5), (30, 10)])
    def test_optimal_never_hurts(self, lam, n, m):
        rep = plugin_design_experiment(n, m, CovModel.gen_ou(0.5, lam, 0.5), replications=0)
        assert rep.rimse >= -1e-3

    def test_given_fits(self):
        fits = [fit(0.5, 4.0, 0.5)]
        rep = plugin_design_experiment(20, 5, TRUTH, fits=fits)
        # a perfect fit reproduces the optimal design
        assert rep.imse_opt_hat == rep.imse_opt and rep.lambda_hat == 4.0

    def test_lambda_hat_clamped(self):
        rep = plugin_design_experiment(20, 5, TRUTH, fits=[fit(0.5, 0.4, 0.5)])
        assert rep.imse_opt_hat == design_imse(TRUTH, optimal_power_design(1.0, 20), 5, 0.123)

    def test_small_replicated_run(self):
        rep = plugin_design_experiment(10, 5, TRUTH, replications=4, schedule=QUICK, seed=3)
        assert rep.fit is not None and np.isfinite(rep.rimse_hat)

    def test_needs_gen_ou(self):
        with pytest.raises(DomainError):
            plugin_design_experiment(20, 5, CovModel.wiener(), replications=0)

    def test_needs_replicates(self):
        with pytest.raises(InsufficientReplicates):
            plugin_design_experiment(20, 1, TRUTH, replications=2)

    def test_ratios_and_csv(self, tmp_path):
        rep = ReductionReport(20, 5, 0.123, 0.2, 0.15, 0.16, 4.2)
        assert rep.rimse == pytest.approx(0.25) and rep.rimse_hat == pytest.approx(0.2)
        path = tmp_path / "red.csv"
        write_reduction_csv(path, [rep])
        rows = list(csv.DictReader(open(path)))
        assert list(rows[0]) == ["m", "IMSE_unif", "IMSE_opt", "rIMSE_lambda", "IMSE_opt_hat", "rIMSE_lambda_hat", "lambda_hat"]

    def test_uniform_designs_differ(self):
        assert design_imse(TRUTH, midpoint_design(20), 5, 0.123) != design_imse(TRUTH, uniform_design(20), 5, 0.123)
