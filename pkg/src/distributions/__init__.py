# Distributions Module
from .specs import (
    Atom,
    Component,
    DiscreteSpec,
    MixtureMoments,
    MixtureSpec,
    PUBLISHED_MIXTURES,
    discrete_moments,
    format_mixture,
    mixture_moments,
    parse_mixture,
)
from .sampling import SeedLike, check_seed, make_generator, sample_discrete, sample_mixture
from .worst_case import (
    four_point_spec,
    kurtosis_map,
    three_point_spec,
    worst_case_chi_candidates,
    worst_case_q,
)
from .empirical import empirical_mean, empirical_median, unbiased_variance

__all__ = [
    "Atom",
    "Component",
    "DiscreteSpec",
    "MixtureMoments",
    "MixtureSpec",
    "PUBLISHED_MIXTURES",
    "discrete_moments",
    "format_mixture",
    "mixture_moments",
    "parse_mixture",
    "SeedLike",
    "check_seed",
    "make_generator",
    "sample_discrete",
    "sample_mixture",
    "four_point_spec",
    "kurtosis_map",
    "three_point_spec",
    "worst_case_chi_candidates",
    "worst_case_q",
    "empirical_mean",
    "empirical_median",
    "unbiased_variance",
]
