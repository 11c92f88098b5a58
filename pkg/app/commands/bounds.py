"""
bounds command: tabulate deviation bounds over a log-spaced epsilon grid.
"""

import logging

from app.config import Settings
from app.models import BoundsRequest
from src.bounds import (
    BOUND_NAMES,
    BoundQuery,
    applicable_bounds,
    bound_curve,
    parse_epsilon_grid,
    write_curve_csv,
)
from src.core.errors import ParameterError
from src.estimators import GeometricGrid
from . import add_output_flag, open_output

logger = logging.getLogger(__name__)

BOUND_HELP = {
    "chebyshev": "empirical mean, variance only: sqrt(v / (2 eps n))",
    "kurtosis": "empirical mean with kurtosis bound and lambda confidence split",
    "fourth_moment": "empirical mean, fourth-moment Chebyshev",
    "empirical_best": "smallest available empirical-mean bound",
    "gaussian": "Gaussian benchmark sqrt(v/n) Phi^-1(1 - eps)",
    "lower_plain": "worst-case empirical-mean deviation, variance only (nan above eps = 1/(2e))",
    "lower_kurtosis": "worst-case empirical-mean deviation with kurtosis (nan unless 1/eps >= n >= 16)",
    "catoni": "M-estimator with epsilon-dependent alpha",
    "catoni_eps_free": "M-estimator with alpha = sqrt(2/(n v))",
    "adaptive": "adaptive estimator over a geometric variance grid",
    "kurtosis_mean": "M-estimator with block variance estimate (observable interval at v_hat = v)",
}


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(
        "bounds",
        help="tabulate deviation bounds as CSV",
        description=(
            "Tabulate every applicable bound (those needing kappa only when --kappa is "
            "given) as epsilon,bound,halfwidth rows. Infeasible points are inf. Bounds: "
            + "; ".join(f"{name}: {text}" for name, text in BOUND_HELP.items())
        ),
    )
    parser.add_argument("--n", required=True, type=int, help="sample size")
    parser.add_argument("--v", required=True, type=float, help="variance of the law")
    parser.add_argument("--kappa", type=float, help="kurtosis bound, enables the kurtosis-aware bounds")
    parser.add_argument(
        "--eps-grid",
        dest="eps_grid",
        required=True,
        metavar="START:STOP:COUNT",
        help="COUNT log-spaced epsilon values between START and STOP, e.g. 0.1:1e-14:200",
    )
    parser.add_argument(
        "--grid",
        metavar="V:rho:s",
        help="variance grid of the adaptive bound; defaults to V=v, rho=1.05, s=95",
    )
    parser.add_argument(
        "--lambda",
        dest="lambda_",
        type=float,
        help="fixed confidence split in (0, 1) for the kurtosis bound instead of the default rule",
    )
    parser.add_argument(
        "--bounds",
        type=lambda text: [name.strip() for name in text.split(",") if name.strip()],
        metavar="NAME,...",
        help=f"restrict to these bounds: {', '.join(BOUND_NAMES)}",
    )
    add_output_flag(parser)
    parser.set_defaults(handler=run)


def run(args, settings: Settings) -> None:
    request = BoundsRequest.from_args(args)
    epsilons = parse_epsilon_grid(request.eps_grid)
    template = BoundQuery.build(
        n=request.n,
        v=request.v,
        kappa=request.kappa,
        epsilon=epsilons[0],
        **{"lambda": request.lambda_},
    )
    grid = GeometricGrid.parse(request.grid) if request.grid else None

    names = applicable_bounds(template)
    if request.bounds is not None:
        unknown = [name for name in request.bounds if name not in BOUND_NAMES]
        if unknown:
            raise ParameterError(f"unknown bound(s) {', '.join(unknown)}; choose from {', '.join(BOUND_NAMES)}")
        names = list(request.bounds)

    logger.info(f"Tabulating {len(names)} bound(s) on {len(epsilons)} epsilon values")
    curves = [bound_curve(template, name, epsilons, grid) for name in names]
    with open_output(request.output) as stream:
        write_curve_csv(curves, stream, settings.float_digits)
