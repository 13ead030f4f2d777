import numpy as np
import pytest

from trapreg.covariance import CovModel, cov_matrix, cov_eval
from trapreg.design import Design, midpoint_design
from trapreg.errors import DomainError
from trapreg.simulation import (
    BLOCK_ROWS,
    RegressionFunction,
    SampleSet,
    read_samples_csv,
    simulate,
    write_samples_csv,
    ybar,
)

from oracles import cubic, cubic_dd

G = RegressionFunction.cubic_growth()


class TestRegressionFunction:
    def test_cubic_growth(self):
        x = np.linspace(0, 1, 101)
        np.testing.assert_allclose(G(x), cubic(x), atol=1e-14)
        np.testing.assert_allclose(G.second_derivative(x), cubic_dd(x), atol=1e-12)
        assert G(0.0) == 0.0 and G(1.0) == pytest.approx(1.0, abs=1e-15)

    def test_dict_round_trip(self):
        p = RegressionFunction.polynomial([1, 2, 3])
        assert RegressionFunction.from_dict(p.to_dict()).coeffs == p.coeffs
        assert RegressionFunction.from_dict(G.to_dict()).coeffs == G.coeffs


class TestSimulate:
    def test_noise_free(self):
        d = midpoint_design(10)
        s = simulate(CovModel.zero(), d, G, 4, seed=1)
        assert s.y.shape == (4, 10)
        assert np.array_equal(s.y, np.tile(G(d.points), (4, 1)))

    def test_deterministic(self):
        d = midpoint_design(7)
        a = simulate(CovModel.wiener(), d, G, 50, seed=123)
        b = simulate(CovModel.wiener(), d, G, 50, seed=123)
        assert a.y.tobytes() == b.y.tobytes()
        c = simulate(CovModel.wiener(), d, G, 50, seed=124)
        assert not np.array_equal(a.y, c.y)

    def test_thread_count_does_not_change_output(self):
        d = midpoint_design(6)
        m = 3 * BLOCK_ROWS + 17
        one = simulate(CovModel.ou(1, 5), d, G, m, seed=9, threads=1)
        four = simulate(CovModel.ou(1, 5), d, G, m, seed=9, threads=4)
        assert one.y.tobytes() == four.y.tobytes()

    def test_prefix_stable(self):
        # the first rows do not depend on how many rows are requested
        d = midpoint_design(5)
        a = simulate(CovModel.wiener(), d, G, 10, seed=5)
        b = simulate(CovModel.wiener(), d, G, 2000, seed=5)
        assert np.array_equal(a.y, b.y[:10])

    def test_covariance_recovery(self):
        d = Design([0.25, 0.75])
        s = simulate(CovModel.wiener(1.0), d, G, 100_000, seed=2024)
        emp = np.cov(s.y, rowvar=False)
        np.testing.assert_allclose(emp, [[0.25, 0.25], [0.25, 0.75]], atol=0.01)

    @pytest.mark.parametrize("model", [CovModel.wiener(0.5), CovModel.ou(1, 25), CovModel.gen_ou(0.5, 4, 0.5)],
                             ids=lambda m: m.family)
    def test_covariance_recovery_n10(self, model):
        # a flat 0.01 is only about 2 standard errors for unit-variance entries,
        # so each entry gets its own 5-sigma band from the Wishart variance
        d = midpoint_design(10)
        m = 100_000
        s = simulate(model, d, G, m, seed=7)
        S = cov_matrix(model, d)
        se = np.sqrt((np.outer(np.diag(S), np.diag(S)) + S**2) / m)
        assert np.all(np.abs(np.cov(s.y, rowvar=False) - S) <= 5 * se)

    @pytest.mark.parametrize("seed", range(5))
    def test_mean_within_five_sigma(self, seed):
        d = midpoint_design(20)
        model = CovModel.wiener(1.0)
        m = 200
        s = simulate(model, d, G, m, seed)
        bound = 5 * np.sqrt(cov_eval(model, d.points, d.points) / m)
        assert np.all(np.abs(ybar(s) - G(d.points)) <= bound)

    def test_needs_replicates(self):
        with pytest.raises(DomainError):
            simulate(CovModel.wiener(), midpoint_design(3), G, 0, 1)


class TestYbar:
    def test_single_row(self):
        s = SampleSet(midpoint_design(3), [[1.0, 2.0, 3.0]])
        assert ybar(s).tolist() == [1.0, 2.0, 3.0]

    def test_average(self):
        s = SampleSet(midpoint_design(3), [[0, 0, 0], [2, 2, 2]])
        assert ybar(s).tolist() == [1.0, 1.0, 1.0]

    def test_shape_check(self):
        with pytest.raises(DomainError):
            SampleSet(midpoint_design(3), np.zeros((2, 4)))


class TestCsv:
    def test_round_trip(self, tmp_path):
        s = simulate(CovModel.gen_ou(0.5, 4, 0.5), midpoint_design(6), G, 8, seed=3)
        path = tmp_path / "y.csv"
        write_samples_csv(s, path)
        back = read_samples_csv(path)
        assert np.array_equal(back.y, s.y)
        assert np.array_equal(back.design.points, s.design.points)
        assert back.seed == 3 and back.model == s.model
