"""
Tests for the kurtosis-aware mean estimator and its confidence split.
"""

import math

import numpy as np
import pytest

from src.core.errors import Condition, InfeasibleError, ParameterError
from src.estimators import (
    MeanMethod,
    XRule,
    ZetaSource,
    approximate_x,
    chi_constants,
    default_kappa_max,
    estimate_mean_kurtosis,
    exact_x,
    halfwidth_kurtosis,
    params_for_zeta,
    plugin_params,
    resolve_params,
    zeta_bound_corollary,
)


class TestPerturbationWidth:

    def test_approximate_value(self):
        np.testing.assert_allclose(approximate_x(0.1, 0.005), 2.7519, rtol=2e-3)

    def test_known_variance_limit(self):
        assert approximate_x(0.0, 0.005) == math.inf
        assert exact_x(0.0, 0.005) == math.inf

    def test_exact_minimizes_ratio(self):
        a = chi_constants().a
        weight = (a + 1.0) / 3.0 * math.sinh(0.05) ** 2

        def ratio(x):
            return (math.log1p(1.0 / x) + math.log(200.0)) / (1.0 - weight * x * x)

        best = exact_x(0.1, 0.005)
        assert ratio(best) <= ratio(approximate_x(0.1, 0.005)) + 1e-12
        assert ratio(best) <= ratio(0.9 * best) + 1e-12
        assert ratio(best) <= ratio(1.1 * best) + 1e-12


class TestParamsForZeta:

    def test_values(self):
        params = params_for_zeta(1000, 0.1, 0.005, 0.005)
        np.testing.assert_allclose(params.x, 2.7519, rtol=2e-3)
        np.testing.assert_allclose(params.eta, 0.011644, rtol=1e-3)
        np.testing.assert_allclose(
            halfwidth_kurtosis(params, 1.0, observable=False), 0.10854, rtol=1e-3
        )
        np.testing.assert_allclose(params.gamma, params.eta / (1.0 - params.eta), rtol=1e-14)
        np.testing.assert_allclose(
            params.c, params.eta / (math.cosh(0.05) ** 2 * (1.0 + params.gamma)), rtol=1e-12
        )
        assert params.feasible

    def test_split_bookkeeping(self):
        params = params_for_zeta(1000, 0.1, 0.002, 0.003)
        np.testing.assert_allclose(params.epsilon, 0.005, rtol=1e-15)
        np.testing.assert_allclose(params.epsilon1, 0.002, rtol=1e-12)
        np.testing.assert_allclose(params.epsilon2, 0.003, rtol=1e-12)

    def test_zero_zeta_is_known_variance(self):
        params = params_for_zeta(1000, 0.0, 0.005, 0.005)
        assert params.x == math.inf
        assert params.perturbation == 0.0
        np.testing.assert_allclose(params.eta, 2.0 * math.log(200.0) / 1000, rtol=1e-14)

    def test_exact_rule_gives_smaller_eta(self):
        approx = params_for_zeta(1000, 0.1, 0.005, 0.005, x_rule=XRule.APPROXIMATE)
        exact = params_for_zeta(1000, 0.1, 0.005, 0.005, x_rule=XRule.EXACT)
        assert exact.eta <= approx.eta + 1e-15

    def test_large_zeta_small_n_infeasible(self):
        with pytest.raises(InfeasibleError) as info:
            params_for_zeta(100, 3.0, 0.005, 0.005)
        assert info.value.condition is Condition.ETA_BELOW_ONE

    def test_wide_perturbation_infeasible(self):
        with pytest.raises(InfeasibleError) as info:
            params_for_zeta(1000, 1.0, 0.005, 0.005, x=10.0)
        assert info.value.condition is Condition.VARIANCE_UNCERTAINTY

    def test_rejects_negative_zeta(self):
        with pytest.raises(ParameterError):
            params_for_zeta(1000, -0.1, 0.005, 0.005)


class TestDefaultKappaMax:

    def test_rule_of_thumb(self):
        assert default_kappa_max(2000) == 12.0
        assert default_kappa_max(1000) == 6.0

    def test_no_default_below_thousand(self):
        with pytest.raises(ParameterError):
            default_kappa_max(999)


class TestPluginParams:

    def test_blocks_source_when_corollary_fails(self):
        params = plugin_params(2000, 0.005, 12.0)
        assert params.zeta_source is ZetaSource.BLOCKS
        assert params.p == 2
        assert params.feasible
        np.testing.assert_allclose(params.epsilon1 + params.epsilon2, 0.005, rtol=1e-12)
        np.testing.assert_allclose(params.y_split, 1.0 / (1.0 + params.x), rtol=1e-6)

    def test_corollary_source_when_valid(self):
        params = plugin_params(2000, 0.005, 3.0)
        assert params.zeta_source is ZetaSource.COROLLARY
        assert params.p is None

    def test_forced_block_size_uses_blocks(self):
        params = plugin_params(2000, 0.005, 3.0, p=5)
        assert params.zeta_source is ZetaSource.BLOCKS
        assert params.p == 5

    def test_forced_corollary_fails_at_high_kurtosis(self):
        with pytest.raises(InfeasibleError):
            plugin_params(2000, 0.005, 12.0, zeta_source=ZetaSource.COROLLARY)

    def test_exact_rule(self):
        params = plugin_params(2000, 0.005, 12.0, x_rule=XRule.EXACT)
        assert params.feasible

    def test_reported_split_reproduces_zeta_and_x(self):
        params = plugin_params(2000, 0.005, 3.0)
        assert params.epsilon == 0.005
        np.testing.assert_allclose(
            params.zeta, zeta_bound_corollary(2000, 3.0, params.epsilon1), rtol=1e-14
        )
        np.testing.assert_allclose(params.x, approximate_x(params.zeta, params.epsilon2), rtol=1e-14)

        blocks = plugin_params(2000, 0.005, 12.0)
        assert blocks.epsilon == 0.005
        np.testing.assert_allclose(
            blocks.zeta, resolve_params(2000, blocks.p, 12.0, blocks.epsilon1).zeta, rtol=1e-14
        )
        np.testing.assert_allclose(blocks.x, approximate_x(blocks.zeta, blocks.epsilon2), rtol=1e-14)

    def test_rejects_kappa_below_one(self):
        with pytest.raises(ParameterError):
            plugin_params(2000, 0.005, 0.5)


class TestHalfwidth:

    def test_observable_and_outer(self):
        params = plugin_params(2000, 0.005, 12.0)
        base = halfwidth_kurtosis(params, 2.0, observable=False)
        np.testing.assert_allclose(base, math.sqrt(params.eta * 2.0 / (1.0 - params.eta)), rtol=1e-14)
        np.testing.assert_allclose(
            halfwidth_kurtosis(params, 2.0), base * math.exp(0.5 * params.zeta), rtol=1e-14
        )
        np.testing.assert_allclose(
            halfwidth_kurtosis(params, 2.0, observable=False, outer=True),
            base * math.exp(params.zeta),
            rtol=1e-14,
        )


class TestEstimate:

    def test_gaussian_interval(self, gaussian_sample):
        estimate = estimate_mean_kurtosis(gaussian_sample, 0.005)
        assert estimate.method is MeanMethod.KURTOSIS
        assert estimate.halfwidth is not None
        assert abs(estimate.theta_hat) <= estimate.halfwidth
        assert {"v_hat", "zeta", "epsilon1"} <= set(estimate.details)
        assert abs(math.log(estimate.details["v_hat"])) <= estimate.details["zeta"]

    def test_symmetric_sample(self):
        data = np.tile([-2.0, -1.0, 1.0, 2.0], 500)
        estimate = estimate_mean_kurtosis(data, 0.005, kappa_max=3.0)
        assert abs(estimate.theta_hat) < 1e-8

    def test_kappa_max_required_below_thousand(self, gaussian_sample):
        with pytest.raises(ParameterError):
            estimate_mean_kurtosis(gaussian_sample.values[:500], 0.005)
