# Estimators Module
from .influence import InfluenceKind, ChiConstants, psi, chi, g, chi_constants
from .mean_catoni import (
    AlphaMode,
    MeanEstimate,
    MeanMethod,
    ThetaRadius,
    criterion,
    solve_mean,
    alpha_known_variance,
    halfwidth_known_variance,
    theta_bounds,
    estimate_mean_known_variance,
    estimate_mean_plugin,
)
from .lepski import (
    GeometricGrid,
    GridInterval,
    AdaptiveResult,
    nu_geometric_mass,
    nu_dyadic_mass,
    homogeneous_bound,
    adaptive_estimate,
    adaptive_halfwidth,
)
from .variance_blocks import (
    XiMode,
    BlockPlan,
    BlockSize,
    VarianceParams,
    VarianceEstimate,
    block_plan,
    optimal_block_size,
    default_block_size,
    check_optimal_block_confidence,
    variance_params,
    resolve_params,
    best_block_size,
    block_variances,
    q_criterion,
    solve_variance,
    zeta_bound_corollary,
    pairwise_variance,
)
from .kurtosis_mean import (
    ZetaSource,
    XRule,
    KurtosisMeanParams,
    default_kappa_max,
    approximate_x,
    exact_x,
    params_for_zeta,
    plugin_params,
    halfwidth_kurtosis,
    estimate_mean_kurtosis,
)

__all__ = [
    "InfluenceKind",
    "ChiConstants",
    "psi",
    "chi",
    "g",
    "chi_constants",
    "AlphaMode",
    "MeanEstimate",
    "MeanMethod",
    "ThetaRadius",
    "criterion",
    "solve_mean",
    "alpha_known_variance",
    "halfwidth_known_variance",
    "theta_bounds",
    "estimate_mean_known_variance",
    "estimate_mean_plugin",
    "GeometricGrid",
    "GridInterval",
    "AdaptiveResult",
    "nu_geometric_mass",
    "nu_dyadic_mass",
    "homogeneous_bound",
    "adaptive_estimate",
    "adaptive_halfwidth",
    "XiMode",
    "BlockPlan",
    "BlockSize",
    "VarianceParams",
    "VarianceEstimate",
    "block_plan",
    "optimal_block_size",
    "default_block_size",
    "check_optimal_block_confidence",
    "variance_params",
    "resolve_params",
    "best_block_size",
    "block_variances",
    "q_criterion",
    "solve_variance",
    "zeta_bound_corollary",
    "pairwise_variance",
    "ZetaSource",
    "XRule",
    "KurtosisMeanParams",
    "default_kappa_max",
    "approximate_x",
    "exact_x",
    "params_for_zeta",
    "plugin_params",
    "halfwidth_kurtosis",
    "estimate_mean_kurtosis",
]
