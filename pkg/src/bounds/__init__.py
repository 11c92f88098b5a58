# Bounds Module
from .query import BoundQuery
from .quantiles import std_normal_quantile, chi_square_quantile
from .upper import (
    LambdaRule,
    chebyshev_halfwidth,
    default_lambda,
    optimal_lambda,
    kurtosis_halfwidth,
    fourth_moment_halfwidth,
    empirical_mean_best_halfwidth,
    gaussian_halfwidth,
    second_moment_upper,
    variance_log_deviation_gaussian,
)
from .lower import lower_bound_plain, lower_bound_kurtosis
from .curves import (
    BOUND_NAMES,
    BoundCurve,
    applicable_bounds,
    bound_curve,
    check_epsilon_grid,
    log_epsilon_grid,
    parse_epsilon_grid,
    write_curve_csv,
)

__all__ = [
    "BoundQuery",
    "std_normal_quantile",
    "chi_square_quantile",
    "LambdaRule",
    "chebyshev_halfwidth",
    "default_lambda",
    "optimal_lambda",
    "kurtosis_halfwidth",
    "fourth_moment_halfwidth",
    "empirical_mean_best_halfwidth",
    "gaussian_halfwidth",
    "second_moment_upper",
    "variance_log_deviation_gaussian",
    "lower_bound_plain",
    "lower_bound_kurtosis",
    "BOUND_NAMES",
    "BoundCurve",
    "applicable_bounds",
    "bound_curve",
    "check_epsilon_grid",
    "log_epsilon_grid",
    "parse_epsilon_grid",
    "write_curve_csv",
]
