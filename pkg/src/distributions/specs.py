"""
Source distributions for experiments: Gaussian mixtures and finite discrete
laws, with their exact moments and the CLI text format for mixtures.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import ParameterError

WEIGHT_TOLERANCE = 1e-12
PARSE_WEIGHT_TOLERANCE = 1e-9


class Component(NamedTuple):
    weight: float
    mean: float
    sd: float


class Atom(NamedTuple):
    value: float
    prob: float


@dataclass(frozen=True)
class MixtureMoments:
    """Mean, variance and kurtosis; kappa is None when v == 0."""
    m: float
    v: float
    kappa: Optional[float] = None

    def to_dict(self) -> Dict[str, Optional[float]]:
        return {"m": self.m, "v": self.v, "kappa": self.kappa}


def _moments_from_central(m: float, v: float, fourth: float) -> MixtureMoments:
    kappa = fourth / (v * v) if v > 0.0 else None
    return MixtureMoments(m=m, v=v, kappa=kappa)


@dataclass(frozen=True)
class MixtureSpec:
    """Mixture sum_i w_i N(mu_i, sd_i^2)."""
    components: Tuple[Component, ...]

    def __post_init__(self):
        components = tuple(Component(*map(float, c)) for c in self.components)
        if not components:
            raise ParameterError("mixture needs at least one component")
        for c in components:
            if not all(math.isfinite(x) for x in c):
                raise ParameterError(f"mixture component {c} is not finite")
            if c.weight <= 0.0:
                raise ParameterError(f"mixture weight must be > 0, got {c.weight:g}")
            if c.sd < 0.0:
                raise ParameterError(f"mixture sd must be >= 0, got {c.sd:g}")
        total = math.fsum(c.weight for c in components)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ParameterError(f"mixture weights sum to {total!r}, not 1")
        object.__setattr__(self, "components", components)

    def moments(self) -> MixtureMoments:
        return mixture_moments(self)

    def sample(self, n: int, seed):
        from .sampling import sample_mixture
        return sample_mixture(self, n, seed)


@dataclass(frozen=True)
class DiscreteSpec:
    """Finite law with atoms (value, probability)."""
    atoms: Tuple[Atom, ...]

    def __post_init__(self):
        atoms = tuple(Atom(*map(float, a)) for a in self.atoms)
        if not atoms:
            raise ParameterError("discrete law needs at least one atom")
        for a in atoms:
            if not (math.isfinite(a.value) and math.isfinite(a.prob)):
                raise ParameterError(f"atom {a} is not finite")
            if a.prob < 0.0:
                raise ParameterError(f"atom probability must be >= 0, got {a.prob:g}")
        total = math.fsum(a.prob for a in atoms)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ParameterError(f"atom probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "atoms", atoms)

    def moments(self) -> MixtureMoments:
        return discrete_moments(self)

    def sample(self, n: int, seed):
        from .sampling import sample_discrete
        return sample_discrete(self, n, seed)


def mixture_moments(spec: MixtureSpec) -> MixtureMoments:
    """
    Exact moments of a Gaussian mixture.

    m = sum w_i mu_i, v = sum w_i (sd_i^2 + d_i^2) and the fourth central
    moment sum w_i (3 sd_i^4 + 6 sd_i^2 d_i^2 + d_i^4), with d_i = mu_i - m.
    """
    w = np.array([c.weight for c in spec.components])
    mu = np.array([c.mean for c in spec.components])
    s2 = np.array([c.sd for c in spec.components]) ** 2
    m = math.fsum(w * mu)
    d2 = (mu - m) ** 2
    v = math.fsum(w * (s2 + d2))
    fourth = math.fsum(w * (3.0 * s2 * s2 + 6.0 * s2 * d2 + d2 * d2))
    return _moments_from_central(m, v, fourth)


def discrete_moments(spec: DiscreteSpec) -> MixtureMoments:
    """Exact moments of a finite law by direct summation."""
    x = np.array([a.value for a in spec.atoms])
    p = np.array([a.prob for a in spec.atoms])
    m = math.fsum(p * x)
    d2 = (x - m) ** 2
    v = math.fsum(p * d2)
    fourth = math.fsum(p * d2 * d2)
    return _moments_from_central(m, v, fourth)


def parse_mixture(text: str) -> MixtureSpec:
    """
    Parse comma-separated weight:mean:sd triples, e.g. "0.7:2:1,0.2:-2:1,0.1:0:30".

    Weights must sum to 1 within 1e-9; they are renormalized exactly.
    """
    components: List[Tuple[float, float, float]] = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 3:
            raise ParameterError(f"mixture component '{item}' is not weight:mean:sd")
        try:
            components.append(tuple(float(p) for p in parts))
        except ValueError as e:
            raise ParameterError(f"mixture component '{item}': {e}") from e
    if not components:
        raise ParameterError(f"empty mixture spec '{text}'")

    total = math.fsum(c[0] for c in components)
    if abs(total - 1.0) > PARSE_WEIGHT_TOLERANCE:
        raise ParameterError(f"mixture weights sum to {total:.12g}, not 1")
    return MixtureSpec(tuple((w / total, mu, sd) for w, mu, sd in components))


def format_mixture(spec: MixtureSpec) -> str:
    return ",".join(f"{c.weight:.17g}:{c.mean:.17g}:{c.sd:.17g}" for c in spec.components)


def _published(*triples: Sequence[float]) -> MixtureSpec:
    return MixtureSpec(tuple(Component(*t) for t in triples))


# Experiment mixtures with their rounded reference (m, v, kappa)
PUBLISHED_MIXTURES: Dict[str, Tuple[MixtureSpec, Tuple[float, float, float]]] = {
    "three-component": (
        _published((0.7, 2.0, 1.0), (0.2, -2.0, 1.0), (0.1, 0.0, 30.0)),
        (1.0, 93.5, 27.86),
    ),
    "contaminated": (
        _published((0.99, 0.0, 1.0), (0.01, 0.0, 30.0)),
        (0.0, 9.99, 243.5),
    ),
    "asymmetric": (
        _published((0.94, 0.0, 1.0), (0.01, 20.0, 20.0), (0.05, -30.0, 20.0)),
        (-1.3, 72.25, 33.4),
    ),
    "light-contamination": (
        _published((0.995, 0.0, 1.0), (0.005, 1.0, 5.0)),
        (0.005, 1.125, 10.357),
    ),
}
