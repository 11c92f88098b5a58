"""
Tests for the closed-form deviation bounds, quantiles and bound curves.
"""

import io
import math

import numpy as np
import pytest

from src.bounds import (
    BOUND_NAMES,
    BoundQuery,
    LambdaRule,
    applicable_bounds,
    bound_curve,
    chebyshev_halfwidth,
    chi_square_quantile,
    default_lambda,
    empirical_mean_best_halfwidth,
    fourth_moment_halfwidth,
    gaussian_halfwidth,
    kurtosis_halfwidth,
    log_epsilon_grid,
    lower_bound_kurtosis,
    lower_bound_plain,
    optimal_lambda,
    parse_epsilon_grid,
    second_moment_upper,
    std_normal_quantile,
    variance_log_deviation_gaussian,
    write_curve_csv,
)
from src.core.errors import DomainError, ParameterError
from src.estimators import GeometricGrid, adaptive_halfwidth, halfwidth_known_variance


def query(**values) -> BoundQuery:
    return BoundQuery.build(**values)


class TestBoundQuery:

    def test_rejects_out_of_range(self):
        with pytest.raises(ParameterError):
            query(n=0, v=1.0, epsilon=0.05)
        with pytest.raises(ParameterError):
            query(n=10, v=1.0, epsilon=0.6)
        with pytest.raises(ParameterError):
            query(n=10, v=1.0, kappa=0.5, epsilon=0.05)
        with pytest.raises(ParameterError):
            query(n=10, v=math.inf, epsilon=0.05)

    def test_at_keeps_other_fields(self):
        base = query(n=10, v=2.0, kappa=3.0, epsilon=0.05, **{"lambda": 0.3})
        moved = base.at(0.01)
        assert moved.epsilon == 0.01
        assert (moved.n, moved.v, moved.kappa, moved.lambda_) == (10, 2.0, 3.0, 0.3)

    def test_require_kappa(self):
        with pytest.raises(ParameterError):
            query(n=10, v=1.0, epsilon=0.05).require_kappa()


class TestQuantiles:

    def test_normal(self):
        np.testing.assert_allclose(std_normal_quantile(0.975), 1.959964, atol=1e-6)
        assert std_normal_quantile(0.5) == 0.0
        np.testing.assert_allclose(std_normal_quantile(0.05), -1.6448536, atol=1e-7)

    def test_normal_domain(self):
        with pytest.raises(DomainError):
            std_normal_quantile(1.0)
        with pytest.raises(DomainError):
            std_normal_quantile(0.0)

    def test_chi_square(self):
        np.testing.assert_allclose(chi_square_quantile(0.95, 10), 18.307, atol=1e-3)

    def test_chi_square_median_large_dof(self):
        dof = 10000
        wilson_hilferty = dof * (1.0 - 2.0 / (9.0 * dof)) ** 3
        np.testing.assert_allclose(chi_square_quantile(0.5, dof), wilson_hilferty, rtol=1e-4)


class TestUpperBounds:

    def test_chebyshev(self):
        np.testing.assert_allclose(
            chebyshev_halfwidth(query(n=100, v=1.0, epsilon=0.05)), math.sqrt(0.1), rtol=1e-14
        )

    def test_fourth_moment(self):
        q = query(n=100, v=1.0, kappa=3.0, epsilon=0.05)
        np.testing.assert_allclose(fourth_moment_halfwidth(q), 30.0 ** 0.25 / 10.0, rtol=1e-14)

    def test_gaussian(self):
        np.testing.assert_allclose(
            gaussian_halfwidth(query(n=100, v=1.0, epsilon=0.05)), 0.164485, atol=1e-6
        )

    def test_kurtosis_default_lambda(self):
        q = query(n=1000, v=1.0, kappa=3.0, epsilon=0.01)
        assert default_lambda(1000, 3.0, 0.01) == 0.5
        np.testing.assert_allclose(kurtosis_halfwidth(q), 0.1294, atol=1e-4)

    def test_kurtosis_explicit_lambda_wins(self):
        q = query(n=1000, v=1.0, kappa=3.0, epsilon=0.01, **{"lambda": 0.5})
        np.testing.assert_allclose(kurtosis_halfwidth(q, LambdaRule.EXACT), kurtosis_halfwidth(q))

    def test_exact_lambda_not_worse(self):
        q = query(n=1000, v=1.0, kappa=3.0, epsilon=0.01)
        lam = optimal_lambda(1000, 3.0, 0.01)
        assert 0.0 < lam < 1.0
        assert kurtosis_halfwidth(q, LambdaRule.EXACT) <= kurtosis_halfwidth(q) + 1e-12

    def test_empirical_best_is_minimum(self):
        q = query(n=100, v=1.0, kappa=3.0, epsilon=0.05)
        expected = min(chebyshev_halfwidth(q), kurtosis_halfwidth(q), fourth_moment_halfwidth(q))
        assert empirical_mean_best_halfwidth(q) == expected
        plain = query(n=100, v=1.0, epsilon=0.05)
        assert empirical_mean_best_halfwidth(plain) == chebyshev_halfwidth(plain)

    def test_scaling_in_v(self):
        one = query(n=200, v=1.0, kappa=4.0, epsilon=0.02)
        four = query(n=200, v=4.0, kappa=4.0, epsilon=0.02)
        for bound in (chebyshev_halfwidth, kurtosis_halfwidth, fourth_moment_halfwidth, gaussian_halfwidth):
            np.testing.assert_allclose(bound(four), 2.0 * bound(one), rtol=1e-13)

    def test_kurtosis_bound_needs_kappa(self):
        with pytest.raises(ParameterError):
            kurtosis_halfwidth(query(n=100, v=1.0, epsilon=0.05))

    def test_second_moment_upper(self):
        np.testing.assert_allclose(
            second_moment_upper(1000, 3.0, 0.01), 1.0 / (1.0 - math.sqrt(2.0 / 20.0)), rtol=1e-14
        )
        assert second_moment_upper(10, 3.0, 0.1) == math.inf

    def test_variance_log_deviation_gaussian(self):
        zeta = variance_log_deviation_gaussian(1000, 0.01)
        assert 0.0 < zeta < 0.2
        assert variance_log_deviation_gaussian(100, 0.01) > zeta


class TestLowerBounds:

    def test_plain(self):
        np.testing.assert_allclose(
            lower_bound_plain(query(n=100, v=1.0, epsilon=0.05)), 0.27637, atol=3e-5
        )

    def test_plain_domain(self):
        with pytest.raises(DomainError):
            lower_bound_plain(query(n=100, v=1.0, epsilon=0.2))

    def test_kurtosis(self):
        q = query(n=100, v=1.0, kappa=3.0, epsilon=0.005)
        np.testing.assert_allclose(lower_bound_kurtosis(q), 0.098985, atol=1e-6)

    def test_kurtosis_domain(self):
        with pytest.raises(DomainError):
            lower_bound_kurtosis(query(n=10, v=1.0, kappa=3.0, epsilon=0.005))
        with pytest.raises(DomainError):
            lower_bound_kurtosis(query(n=100, v=1.0, kappa=3.0, epsilon=0.05))

    def test_lower_below_upper(self):
        for eps in (0.001, 0.01, 0.1):
            q = query(n=100, v=1.0, epsilon=eps)
            assert lower_bound_plain(q) <= chebyshev_halfwidth(q)


class TestEpsilonGrid:

    def test_log_grid_is_increasing(self):
        grid = log_epsilon_grid(0.1, 1e-14, 200)
        assert len(grid) == 200
        np.testing.assert_allclose([grid[0], grid[-1]], [1e-14, 0.1], rtol=1e-12)
        assert all(b > a for a, b in zip(grid, grid[1:]))

    def test_parse(self):
        np.testing.assert_allclose(parse_epsilon_grid("0.1:0.001:3"), [0.001, 0.01, 0.1], rtol=1e-12)

    @pytest.mark.parametrize("text", ["0.1:0.01", "x:0.1:3", "0.1:0.01:0", "0.9:0.01:3"])
    def test_parse_rejects(self, text):
        with pytest.raises(ParameterError):
            parse_epsilon_grid(text)


class TestBoundCurves:

    def test_applicable_bounds(self):
        names = applicable_bounds(query(n=100, v=1.0, epsilon=0.05))
        assert "chebyshev" in names
        assert "kurtosis" not in names
        assert "lower_kurtosis" not in names
        everything = applicable_bounds(query(n=100, v=1.0, kappa=3.0, epsilon=0.05))
        assert everything == list(BOUND_NAMES)

    def test_chebyshev_curve(self):
        curve = bound_curve(query(n=100, v=1.0, epsilon=0.5), "chebyshev", [0.01, 0.05, 0.1])
        np.testing.assert_allclose(curve.halfwidths, [0.70711, 0.31623, 0.22361], atol=1e-5)
        assert curve.epsilons == [0.01, 0.05, 0.1]

    def test_infeasible_points_are_infinite(self):
        curve = bound_curve(query(n=10, v=1.0, epsilon=0.5), "catoni", [1e-6, 0.1])
        assert curve.halfwidths[0] == math.inf
        np.testing.assert_allclose(curve.halfwidths[1], halfwidth_known_variance(10, 1.0, 0.1))

    def test_lower_bound_outside_domain_is_nan(self):
        curve = bound_curve(query(n=100, v=1.0, epsilon=0.5), "lower_plain", [0.01, 0.3])
        assert math.isfinite(curve.halfwidths[0])
        assert math.isnan(curve.halfwidths[1])

    def test_adaptive_default_grid(self):
        curve = bound_curve(query(n=500, v=1.0, epsilon=0.5), "adaptive", [0.01])
        grid = GeometricGrid(V=1.0, rho=1.05, s=95)
        np.testing.assert_allclose(curve.halfwidths[0], adaptive_halfwidth(1.0, grid, 0.01, 500))

    def test_adaptive_custom_grid(self):
        grid = GeometricGrid(V=2.0, rho=1.1, s=10)
        curve = bound_curve(query(n=500, v=1.0, epsilon=0.5), "adaptive", [0.01], grid)
        np.testing.assert_allclose(curve.halfwidths[0], adaptive_halfwidth(1.0, grid, 0.01, 500))

    def test_kurtosis_mean_curve(self):
        curve = bound_curve(query(n=2000, v=1.0, kappa=12.0, epsilon=0.5), "kurtosis_mean", [0.005])
        assert 0.0 < curve.halfwidths[0] < 1.0

    def test_unknown_bound(self):
        with pytest.raises(ParameterError):
            bound_curve(query(n=100, v=1.0, epsilon=0.5), "nope", [0.1])

    def test_kappa_bound_without_kappa(self):
        with pytest.raises(ParameterError):
            bound_curve(query(n=100, v=1.0, epsilon=0.5), "fourth_moment", [0.1])

    def test_write_csv(self):
        curves = [
            bound_curve(query(n=100, v=1.0, epsilon=0.5), "chebyshev", [0.5]),
            bound_curve(query(n=2, v=1.0, epsilon=0.5), "catoni", [0.25]),
        ]
        stream = io.StringIO()
        write_curve_csv(curves, stream)
        assert stream.getvalue() == "epsilon,bound,halfwidth\n0.5,chebyshev,0.10000000000000001\n0.25,catoni,inf\n"
