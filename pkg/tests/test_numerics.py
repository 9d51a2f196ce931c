"""Least-squares and tail-probability kernels against independent oracles."""

import math

import numpy as np
import pytest
from scipy import integrate

from co2panel.errors import InvalidDegreesOfFreedom, NonPositiveVariance, RankDeficient
from co2panel.numerics import (
    chi_square,
    f_dist,
    gaussian_loglik,
    solve_least_squares,
    standard_normal,
    student_t,
    tail_probability,
)


class TestSolveLeastSquares:
    def test_exact_line(self):
        X = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]])
        y = np.array([0.0, 2.0, 4.0])
        sol = solve_least_squares(X, y)
        assert sol.coefficients == pytest.approx([0.0, 2.0], abs=1e-12)
        assert sol.residual_sum_squares == pytest.approx(0.0, abs=1e-20)
        assert sol.rank == 2

    def test_matches_normal_equations_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            n = int(rng.integers(8, 51))
            k = int(rng.integers(1, 7))
            X = rng.normal(0, 1, (n, k))
            y = rng.normal(0, 1, n)
            sol = solve_least_squares(X, y)
            oracle = np.linalg.inv(X.T @ X) @ (X.T @ y)
            assert np.allclose(sol.coefficients, oracle, rtol=1e-8, atol=1e-10)

    def test_duplicate_column_rank_deficient(self):
        rng = np.random.default_rng(0)
        x = rng.normal(0, 1, 10)
        X = np.column_stack([np.ones(10), x, x])
        with pytest.raises(RankDeficient) as err:
            solve_least_squares(X, np.arange(10.0))
        assert err.value.rank == 2
        assert err.value.column in (1, 2)

    def test_residual_orthogonality(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            X = rng.normal(0, 1, (30, 4))
            y = rng.normal(0, 1, 30)
            sol = solve_least_squares(X, y)
            assert np.max(np.abs(X.T @ sol.residuals)) <= 1e-8 * np.linalg.norm(y)

    def test_covariance_unscaled_is_xtx_inverse(self):
        rng = np.random.default_rng(11)
        X = rng.normal(0, 1, (25, 3))
        sol = solve_least_squares(X, rng.normal(0, 1, 25))
        assert np.allclose(sol.covariance_unscaled, np.linalg.inv(X.T @ X), rtol=1e-9)
        eigs = np.linalg.eigvalsh(sol.covariance_unscaled)
        assert eigs.min() > 0


class TestGaussianLoglik:
    def test_zero_residual_special_variance(self):
        # -0.5*log(2*pi*sigma2) = 0 when sigma2 = 1/(2*pi)
        assert gaussian_loglik([0.0], 1.0 / (2.0 * math.pi)) == pytest.approx(0.0, abs=1e-14)

    def test_zero_residuals_unit_variance(self):
        assert gaussian_loglik([0.0, 0.0, 0.0], 1.0) == pytest.approx(
            3 * (-0.5 * math.log(2 * math.pi)))

    def test_monotone_in_residual_magnitude(self):
        base = gaussian_loglik([0.5, -0.2, 1.0], 2.0)
        worse = gaussian_loglik([0.5, -0.2, 1.5], 2.0)
        assert worse < base

    def test_nonpositive_variance(self):
        with pytest.raises(NonPositiveVariance):
            gaussian_loglik([1.0], 0.0)


class TestTailProbability:
    def test_symmetric_center(self):
        for df in (1, 5, 30):
            assert tail_probability(0.0, student_t(df), "two") == pytest.approx(1.0)

    def test_chi_square_quantile_vs_quadrature(self):
        # independent numerical-integration oracle for the upper tail
        df = 1

        def pdf(x):
            return x ** (df / 2 - 1) * math.exp(-x / 2) / (2 ** (df / 2) * math.gamma(df / 2))

        oracle, _ = integrate.quad(pdf, 3.841459, np.inf)
        p = tail_probability(3.841459, chi_square(1))
        assert p == pytest.approx(oracle, abs=1e-10)
        assert p == pytest.approx(0.05, abs=1e-4)

    def test_published_f_value(self):
        assert tail_probability(1.0544, f_dist(24, 456)) == pytest.approx(0.394, abs=0.02)

    def test_published_t_value(self):
        assert tail_probability(2.228, student_t(10), "two") == pytest.approx(0.05, abs=1e-3)

    def test_normal_tail(self):
        assert tail_probability(1.959963984540054, standard_normal, "two") == pytest.approx(
            0.05, abs=1e-9)

    def test_monotone_decreasing(self):
        for dist in (student_t(7), chi_square(3), f_dist(4, 17), standard_normal):
            stats = np.linspace(0.1, 8.0, 25)
            ps = [tail_probability(s, dist) for s in stats]
            assert all(a > b for a, b in zip(ps, ps[1:]))

    def test_chi_square_median_envelope(self):
        for df in range(1, 101):
            p = tail_probability(float(df), chi_square(df))
            assert 0.3 < p < 0.6

    def test_invalid_df(self):
        with pytest.raises(InvalidDegreesOfFreedom):
            tail_probability(1.0, chi_square(0))
        with pytest.raises(InvalidDegreesOfFreedom):
            tail_probability(1.0, f_dist(-1, 5))

    def test_bounds(self):
        assert 0.0 <= tail_probability(1e8, chi_square(2)) <= 1.0
        assert tail_probability(-50.0, standard_normal) == pytest.approx(1.0)
