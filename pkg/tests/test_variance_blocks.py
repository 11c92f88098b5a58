"""
Tests for the block-threshold variance estimator and its tuning.
"""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from src.core.errors import Condition, DegenerateDataError, InfeasibleError, ParameterError
from src.distributions import make_generator, unbiased_variance
from src.estimators import (
    InfluenceKind,
    XiMode,
    best_block_size,
    check_optimal_block_confidence,
    default_block_size,
    block_plan,
    block_variances,
    optimal_block_size,
    pairwise_variance,
    psi,
    q_criterion,
    resolve_params,
    solve_variance,
    variance_params,
    zeta_bound_corollary,
)


def _beta_by_bisection(values, params, kind):
    variances = block_variances(values, block_plan(len(values), params.p))

    def excess(beta):
        return float(np.mean(psi(kind, beta * variances - params.delta))) + params.y

    hi = 1.0 / float(np.max(variances))
    while excess(hi) <= 0.0:
        hi *= 2.0
    return brentq(excess, 0.0, hi, xtol=1e-15 * hi, rtol=1e-15)


def _check_solver_agreement(cases, seed):
    for index in range(cases):
        rng = make_generator(seed, index)
        n = int(rng.integers(1000, 3001))
        scale = float(rng.uniform(0.01, 100.0))
        shape = index % 3
        if shape == 0:
            values = rng.normal(0.0, scale, n)
        elif shape == 1:
            values = rng.standard_t(5, n) * scale
        else:
            values = rng.lognormal(0.0, 0.5, n) * scale
        kind = list(InfluenceKind)[index % 2]
        estimate = solve_variance(values, 3.0, 0.005, kind=kind)
        oracle = _beta_by_bisection(values, estimate.params, kind)
        np.testing.assert_allclose(estimate.beta_hat, oracle, rtol=1e-7, err_msg=f"case {index}")


class TestBlockPlan:

    def test_remainder_goes_to_last_block(self):
        plan = block_plan(10, 3)
        assert (plan.q, plan.r) == (3, 1)
        assert plan.ranges == [(0, 3), (3, 6), (6, 10)]
        assert plan.sizes == [3, 3, 4]

    @pytest.mark.parametrize("n, p", [(10, 1), (10, 6), (3, 2)])
    def test_rejects_bad_sizes(self, n, p):
        with pytest.raises(ParameterError):
            block_plan(n, p)

    def test_block_variances(self):
        plan = block_plan(10, 3)
        np.testing.assert_allclose(
            block_variances(np.arange(10.0), plan), [1.0, 1.0, np.var([6, 7, 8, 9], ddof=1)]
        )

    def test_block_variances_size_mismatch(self):
        with pytest.raises(ParameterError):
            block_variances(np.arange(8.0), block_plan(10, 2))


class TestOptimalBlockSize:

    def test_value(self):
        size = optimal_block_size(1000, 3.0, 0.005)
        assert size.p == 4
        assert not size.clamped
        assert int(size) == 4

    def test_clamped_to_two(self):
        size = optimal_block_size(100, 3.0, 0.005)
        assert size.p == 2
        assert size.clamped

    def test_kappa_one_takes_largest_blocks(self):
        size = optimal_block_size(100, 1.0, 0.005)
        assert size.p == 50

    def test_rejects_bad_confidence(self):
        with pytest.raises(ParameterError):
            optimal_block_size(1000, 3.0, 1.0)
        with pytest.raises(ParameterError):
            optimal_block_size(1000, 0.5, 0.01)


class TestVarianceParams:

    def test_simple_values(self):
        params = variance_params(1000, 4, 3.0, 0.005, XiMode.SIMPLE)
        np.testing.assert_allclose(params.chi, 8.0 / 3.0, rtol=1e-15)
        np.testing.assert_allclose(params.delta, 0.25215, atol=1e-5)
        np.testing.assert_allclose(params.y, 0.042386, atol=1e-6)
        np.testing.assert_allclose(params.xi, 2.0 * params.y * (1.0 + 2.0 * params.y), rtol=1e-15)
        np.testing.assert_allclose(params.xi, 0.09196, atol=1e-5)
        np.testing.assert_allclose(params.zeta, -0.5 * math.log(1.0 - params.xi / params.delta), rtol=1e-12)
        assert (params.q, params.r) == (250, 0)
        assert params.feasible

    def test_tight_is_smaller_than_simple(self):
        tight = variance_params(1000, 4, 3.0, 0.005, XiMode.TIGHT)
        simple = variance_params(1000, 4, 3.0, 0.005, XiMode.SIMPLE)
        np.testing.assert_allclose(tight.xi, 0.076779, atol=1e-5)
        assert tight.xi <= simple.xi
        assert tight.zeta <= simple.zeta

    def test_tight_high_kurtosis(self):
        params = variance_params(2000, 2, 12.0, 0.0025, XiMode.TIGHT)
        np.testing.assert_allclose(params.xi, 0.019897, atol=1e-5)
        np.testing.assert_allclose(params.zeta, 0.31125, atol=1e-4)

    def test_tight_discriminant_failure(self):
        with pytest.raises(InfeasibleError) as info:
            variance_params(100, 2, 3.0, 0.0025, XiMode.TIGHT)
        assert info.value.condition is Condition.TIGHT_DISCRIMINANT

    def test_default_mode_falls_back_to_simple(self):
        # The fallback is taken, then the simple confidence condition fails too
        with pytest.raises(InfeasibleError) as info:
            resolve_params(100, 2, 3.0, 0.0025)
        assert info.value.condition is Condition.SIMPLE_CONFIDENCE

    def test_explicit_mode_has_no_fallback(self):
        with pytest.raises(InfeasibleError) as info:
            resolve_params(100, 2, 3.0, 0.0025, XiMode.TIGHT)
        assert info.value.condition is Condition.TIGHT_DISCRIMINANT

    def test_default_mode_prefers_tight(self):
        assert resolve_params(1000, 4, 3.0, 0.005).xi_mode is XiMode.TIGHT

    def test_best_block_size_minimizes_zeta(self):
        best = best_block_size(1000, 3.0, 0.005)
        at_four = variance_params(1000, 4, 3.0, 0.005)
        assert best.zeta <= at_four.zeta

    def test_to_dict(self):
        row = variance_params(1000, 4, 3.0, 0.005).to_dict()
        assert row["p"] == 4
        assert row["xi_mode"] == "tight"


class TestCorollary:

    def test_value(self):
        np.testing.assert_allclose(zeta_bound_corollary(2000, 3.0, 0.0025), 0.17788, atol=1e-5)

    def test_large_n_asymptote(self):
        n = 10 ** 9
        asymptote = math.sqrt(2.0 * 2.0 * math.log(400.0) / n)
        np.testing.assert_allclose(zeta_bound_corollary(n, 3.0, 0.0025) / asymptote, 1.0, atol=1e-2)

    def test_infeasible_at_small_n(self):
        with pytest.raises(InfeasibleError) as info:
            zeta_bound_corollary(100, 3.0, 0.0025)
        assert info.value.condition is Condition.OPTIMAL_BLOCK_CONFIDENCE

    def test_rejects_kappa_one(self):
        with pytest.raises(ParameterError):
            zeta_bound_corollary(2000, 1.0, 0.0025)

    def test_message_states_the_inequality(self):
        with pytest.raises(InfeasibleError) as info:
            zeta_bound_corollary(100, 3.0, 0.0025)
        assert "log(1/epsilon1) <= n/(36(kappa-1)) - 1/8" in str(info.value)
        assert info.value.minimal_n == 441


class TestOptimalBlockConfidence:

    def test_boundary_sample_size(self):
        check_optimal_block_confidence(2165, 3.0, 1e-13)
        with pytest.raises(InfeasibleError) as info:
            check_optimal_block_confidence(2164, 3.0, 1e-13)
        assert info.value.condition is Condition.OPTIMAL_BLOCK_CONFIDENCE
        assert info.value.minimal_n == 2165

    def test_kappa_one_has_nothing_to_check(self):
        check_optimal_block_confidence(10, 1.0, 1e-13)
        assert default_block_size(100, 1.0, 0.005) == 50

    def test_default_block_size(self):
        assert default_block_size(1000, 3.0, 0.005) == optimal_block_size(1000, 3.0, 0.005).p
        with pytest.raises(InfeasibleError):
            default_block_size(2000, 12.0, 0.0025)

    def test_solver_enforces_it_for_the_default_block_size(self, gaussian_sample):
        with pytest.raises(InfeasibleError) as info:
            solve_variance(gaussian_sample, 3.0, 1e-13)
        assert info.value.condition is Condition.OPTIMAL_BLOCK_CONFIDENCE
        text = str(info.value)
        assert text.startswith("infeasible: optimal-block confidence range condition violated")
        assert "log(1/epsilon1) <= n/(36(kappa-1)) - 1/8" in text
        assert text.endswith("requires n >= 2165")

    def test_explicit_block_size_is_not_held_to_it(self, gaussian_sample):
        estimate = solve_variance(gaussian_sample, 3.0, 1e-13, p=2)
        assert estimate.params.p == 2
        assert abs(math.log(estimate.v_hat)) <= estimate.zeta

    def test_tight_and_simple_failures_state_their_inequality(self):
        with pytest.raises(InfeasibleError) as info:
            variance_params(100, 2, 3.0, 0.0025, XiMode.TIGHT)
        assert "(1 + chi delta/p)^2 >= 4 (1 + chi/p) y" in str(info.value)
        with pytest.raises(InfeasibleError) as info:
            variance_params(100, 2, 3.0, 0.0025, XiMode.SIMPLE)
        assert "log(1/epsilon1) <= min(q/(4(1 + sqrt 2)), (n - r)/(8 chi))" in str(info.value)


class TestCriterion:

    def test_two_blocks(self):
        plan = block_plan(4, 2)
        value = q_criterion([1.0, 2.0, 3.0, 4.0], plan, beta=1.0, delta=0.0)
        np.testing.assert_allclose(value, -math.log(0.625), rtol=1e-14)

    def test_non_decreasing_in_beta(self, gaussian_sample):
        plan = block_plan(gaussian_sample.n, 5)
        values = [q_criterion(gaussian_sample, plan, b, 0.3) for b in np.linspace(0.0, 3.0, 61)]
        assert np.all(np.diff(values) >= 0.0)

    def test_non_decreasing_in_beta_randomized(self):
        rng = np.random.default_rng(404)
        for trial in range(60):
            n = int(rng.integers(8, 400))
            p = int(rng.integers(2, n // 2 + 1))
            data = rng.standard_t(3, size=n) * rng.uniform(0.1, 10.0) + rng.normal(0.0, 5.0)
            delta = float(rng.uniform(0.0, 2.0))
            kind = list(InfluenceKind)[trial % 2]
            plan = block_plan(n, p)
            betas = np.sort(rng.exponential(2.0, size=40))
            values = [q_criterion(data, plan, b, delta, kind) for b in betas]
            assert np.all(np.diff(values) >= -1e-14), (trial, n, p)

    def test_rejects_negative_beta(self):
        with pytest.raises(ParameterError):
            q_criterion([1.0, 2.0, 3.0, 4.0], block_plan(4, 2), beta=-1.0, delta=0.0)


class TestSolveVariance:

    def test_gaussian_within_zeta(self, gaussian_sample):
        estimate = solve_variance(gaussian_sample, 3.0, 0.005)
        assert estimate.params.p == 6
        assert abs(math.log(estimate.v_hat)) <= estimate.zeta

    def test_root_of_criterion(self, gaussian_sample):
        estimate = solve_variance(gaussian_sample, 3.0, 0.005)
        params = estimate.params
        plan = block_plan(gaussian_sample.n, params.p)
        value = q_criterion(gaussian_sample, plan, estimate.beta_hat, params.delta)
        np.testing.assert_allclose(value, -params.y, atol=1e-8)
        np.testing.assert_allclose(
            estimate.v_hat,
            math.sqrt(params.delta * (params.delta - params.xi)) / estimate.beta_hat,
            rtol=1e-14,
        )

    def test_scale_equivariance(self, gaussian_sample):
        base = solve_variance(gaussian_sample, 3.0, 0.005).v_hat
        scaled = solve_variance(gaussian_sample.scaled(3.0).shifted(-5.0), 3.0, 0.005).v_hat
        np.testing.assert_allclose(scaled, 9.0 * base, rtol=1e-6)

    @pytest.mark.parametrize("s, c", [(0.01, 0.0), (4.0, 1e3), (250.0, -7.0)])
    def test_variance_scales_with_square(self, gaussian_sample, s, c):
        base = solve_variance(gaussian_sample, 3.0, 0.005)
        moved = solve_variance(gaussian_sample.scaled(s).shifted(c), 3.0, 0.005)
        np.testing.assert_allclose(moved.v_hat, s * s * base.v_hat, rtol=1e-6)
        assert moved.zeta == base.zeta

    def test_agrees_with_bisection(self):
        _check_solver_agreement(cases=120, seed=31)

    @pytest.mark.slow
    def test_agrees_with_bisection_at_scale(self):
        _check_solver_agreement(cases=10_000, seed=32)

    @pytest.mark.slow
    def test_gaussian_coverage_at_high_kurtosis_bound(self):
        # Outside the optimal-block confidence range here, so the block size is passed explicitly
        p = optimal_block_size(2000, 12.0, 0.0025).p
        assert p == 2
        reps = 5000
        hits = 0
        for index in range(reps):
            sample = make_generator(2024, index).standard_normal(2000)
            estimate = solve_variance(sample, 12.0, 0.0025, p=p)
            hits += abs(math.log(estimate.v_hat)) <= estimate.zeta
        assert hits >= 0.995 * reps

    @pytest.mark.parametrize("kind", list(InfluenceKind))
    def test_explicit_block_size_and_mode(self, gaussian_sample, kind):
        estimate = solve_variance(gaussian_sample, 3.0, 0.005, p=4, xi_mode=XiMode.SIMPLE, kind=kind)
        assert estimate.params.p == 4
        assert estimate.params.xi_mode is XiMode.SIMPLE
        assert estimate.v_hat > 0.0

    def test_constant_sample_is_degenerate(self):
        with pytest.raises(DegenerateDataError):
            solve_variance(np.full(2000, 1.5), 3.0, 0.005)

    def test_too_few_observations(self):
        with pytest.raises(DegenerateDataError):
            solve_variance([1.0, 2.0, 3.0], 3.0, 0.005)

    def test_infeasible_parameters(self, gaussian_sample):
        with pytest.raises(InfeasibleError) as info:
            solve_variance(gaussian_sample.values[:100], 3.0, 0.0025)
        assert info.value.condition is Condition.OPTIMAL_BLOCK_CONFIDENCE

    def test_to_dict(self, gaussian_sample):
        row = solve_variance(gaussian_sample, 3.0, 0.005).to_dict()
        assert {"v_hat", "zeta", "beta_hat", "p", "xi_mode"} <= set(row)


class TestPairwiseVariance:

    def test_equals_unbiased_variance(self):
        data = [1.0, 4.0, -2.0, 0.5, 3.0]
        np.testing.assert_allclose(pairwise_variance(data), unbiased_variance(data), rtol=1e-13)

    def test_needs_two_points(self):
        with pytest.raises(DegenerateDataError):
            pairwise_variance([1.0])

    def test_linear_memory_at_large_n(self):
        data = np.random.default_rng(77).normal(3.0, 2.0, 2_000_000)
        np.testing.assert_allclose(pairwise_variance(data), np.var(data, ddof=1), rtol=1e-10)

    @pytest.mark.parametrize("n", [2, 3, 17, 300])
    def test_matches_sum_over_pairs(self, n):
        data = np.random.default_rng(n).normal(5.0, 3.0, n)
        diffs = np.subtract.outer(data, data)
        pair_sum = float(np.sum(np.triu(diffs * diffs, k=1)))
        np.testing.assert_allclose(pairwise_variance(data), pair_sum / (n * (n - 1)), rtol=1e-10)
