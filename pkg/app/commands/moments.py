"""
moments command: exact mean, variance and kurtosis of a mixture.
"""

from app.config import Settings
from app.models import MomentsRequest
from src.core.formatting import write_csv
from src.distributions import PUBLISHED_MIXTURES, parse_mixture
from . import add_output_flag, open_output

HEADER = ("m", "v", "kappa")


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(
        "moments",
        help="print m, v, kappa of a Gaussian mixture",
        description=(
            "Print the exact mean m, variance v and kurtosis kappa of a Gaussian "
            "mixture as one CSV row. kappa is empty for a zero-variance mixture."
        ),
    )
    parser.add_argument(
        "--mixture",
        required=True,
        help=(
            "comma-separated weight:mean:sd triples, e.g. 0.7:2:1,0.2:-2:1,0.1:0:30, "
            f"or one of the published experiment mixtures: {', '.join(PUBLISHED_MIXTURES)}"
        ),
    )
    add_output_flag(parser)
    parser.set_defaults(handler=run)


def run(args, settings: Settings) -> None:
    request = MomentsRequest.from_args(args)
    if request.mixture in PUBLISHED_MIXTURES:
        spec, _ = PUBLISHED_MIXTURES[request.mixture]
    else:
        spec = parse_mixture(request.mixture)
    moments = spec.moments()

    with open_output(request.output) as stream:
        write_csv(stream, HEADER, [(moments.m, moments.v, moments.kappa)], settings.float_digits)
