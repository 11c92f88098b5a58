"""
estimate-variance command: block-threshold variance estimate on a data file.
"""

import logging

from app.config import Settings
from app.models import EstimateVarianceRequest
from src.core.formatting import write_csv
from src.core.sample import load_sample
from src.estimators import InfluenceKind, XiMode, solve_variance
from . import add_output_flag, open_output

logger = logging.getLogger(__name__)

HEADER = ("v_hat", "zeta")


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(
        "estimate-variance",
        help="estimate the variance of a data file",
        description=(
            "Print v_hat and zeta as one CSV row; with probability at least "
            "1 - 2 epsilon1, |log v_hat - log v| <= zeta for any law whose "
            "kurtosis is at most kappa-max."
        ),
    )
    parser.add_argument("--input", required=True, help="data file, one decimal number per line")
    parser.add_argument(
        "--kappa-max",
        dest="kappa_max",
        required=True,
        type=float,
        help="kurtosis upper bound kappa >= 1",
    )
    parser.add_argument(
        "--epsilon1",
        required=True,
        type=float,
        help="confidence parameter of the variance interval, in (0, 1)",
    )
    parser.add_argument(
        "--p",
        type=int,
        help=(
            "block size, 2 <= p <= n/2; defaults to the approximately optimal size, "
            "which requires log(1/epsilon1) <= n/(36(kappa-1)) - 1/8"
        ),
    )
    parser.add_argument(
        "--xi",
        choices=[m.value for m in XiMode],
        help=(
            "bound on the block-variance fluctuation xi: tight (closed-form root) or "
            "simple (closed-form upper bound); tight with fallback to simple when omitted"
        ),
    )
    parser.add_argument(
        "--psi",
        choices=[k.value for k in InfluenceKind],
        default=InfluenceKind.NARROW.value,
        help="influence function of the block criterion",
    )
    add_output_flag(parser)
    parser.set_defaults(handler=run)


def run(args, settings: Settings) -> None:
    request = EstimateVarianceRequest.from_args(args)
    sample = load_sample(request.input)
    logger.info(f"Estimating the variance of {sample.n} observations")
    result = solve_variance(
        sample,
        request.kappa_max,
        request.epsilon1,
        p=request.p,
        xi_mode=request.xi,
        kind=request.psi,
        tolerance=settings.variance_tolerance,
    )
    with open_output(request.output) as stream:
        write_csv(stream, HEADER, [(result.v_hat, result.zeta)], settings.float_digits)
