"""
estimate-mean command: Catoni mean estimates on a data file.
"""

import logging

from app.config import Settings
from app.models import EstimateMeanRequest
from src.core.errors import DegenerateDataError
from src.core.formatting import write_csv
from src.core.sample import load_sample
from src.distributions.empirical import unbiased_variance
from src.estimators import (
    AlphaMode,
    GeometricGrid,
    InfluenceKind,
    MeanEstimate,
    MeanMethod,
    adaptive_estimate,
    estimate_mean_known_variance,
    estimate_mean_kurtosis,
    estimate_mean_plugin,
)
from . import add_output_flag, open_output

logger = logging.getLogger(__name__)

HEADER = ("estimate", "halfwidth")

DEFAULT_GRID_RHO = 1.05
DEFAULT_GRID_S = 95


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(
        "estimate-mean",
        help="estimate the mean of a data file",
        description=(
            "Print the M-estimate of the mean and its halfwidth as one CSV row. "
            "The halfwidth field is empty when the method proves no observable interval."
        ),
    )
    parser.add_argument("--input", required=True, help="data file, one decimal number per line")
    parser.add_argument(
        "--method",
        required=True,
        choices=[m.value for m in MeanMethod],
        help=(
            "known-v: alpha tuned to a known variance bound, interval sqrt(2 v log(1/eps) / (n - 2 log(1/eps))); "
            "eps-free: alpha = sqrt(2/(n v)), usable at every epsilon at once; "
            "plugin: unbiased variance estimate plugged in for v, no interval; "
            "lepski: adaptation over a geometric variance grid, no observable interval; "
            "kurtosis: variance estimated by blocks under a kurtosis bound, observable interval"
        ),
    )
    parser.add_argument(
        "--epsilon",
        required=True,
        type=float,
        help="confidence parameter in (0, 1/2]; intervals hold with probability 1 - 2 epsilon",
    )
    parser.add_argument("--variance", type=float, help="known variance bound v (known-v, eps-free)")
    parser.add_argument(
        "--kappa-max",
        dest="kappa_max",
        type=float,
        help="kurtosis upper bound (kurtosis); defaults to 6n/1000 for n >= 1000",
    )
    parser.add_argument(
        "--grid",
        metavar="V:rho:s",
        help="variance grid V rho^2k, |k| <= s (lepski); defaults to the unbiased variance with rho=1.05, s=95",
    )
    parser.add_argument(
        "--psi",
        choices=[k.value for k in InfluenceKind],
        default=InfluenceKind.NARROW.value,
        help="influence function: narrow (flat beyond |x| = 1) or wide (logarithmic growth)",
    )
    add_output_flag(parser)
    parser.set_defaults(handler=run)


def _default_grid(sample) -> GeometricGrid:
    v_hat = unbiased_variance(sample)
    if v_hat == 0.0:
        raise DegenerateDataError("cannot center the variance grid on a zero variance estimate")
    return GeometricGrid(V=v_hat, rho=DEFAULT_GRID_RHO, s=DEFAULT_GRID_S)


def estimate(request: EstimateMeanRequest, settings: Settings) -> MeanEstimate:
    """Run the requested recipe on the request's data file."""
    sample = load_sample(request.input)
    method = request.method
    kind = request.psi
    logger.info(f"Estimating the mean of {sample.n} observations with method {method.value}")

    if method is MeanMethod.KNOWN_VARIANCE or method is MeanMethod.EPS_FREE:
        mode = AlphaMode.EPS_FREE if method is MeanMethod.EPS_FREE else AlphaMode.EPS_DEPENDENT
        return estimate_mean_known_variance(
            sample, request.variance, request.epsilon, mode, kind, settings.mean_tolerance
        )
    if method is MeanMethod.PLUG_IN:
        return estimate_mean_plugin(sample, request.epsilon, kind, settings.mean_tolerance)
    if method is MeanMethod.LEPSKI:
        grid = GeometricGrid.parse(request.grid) if request.grid else _default_grid(sample)
        result = adaptive_estimate(sample, request.epsilon, grid, kind, settings.mean_tolerance)
        return result.to_estimate()
    return estimate_mean_kurtosis(
        sample,
        request.epsilon,
        request.kappa_max,
        kind,
        tolerance=settings.mean_tolerance,
        variance_tolerance=settings.variance_tolerance,
    )


def run(args, settings: Settings) -> None:
    request = EstimateMeanRequest.from_args(args)
    result = estimate(request, settings)
    with open_output(request.output) as stream:
        write_csv(stream, HEADER, [(result.theta_hat, result.halfwidth)], settings.float_digits)
