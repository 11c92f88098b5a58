"""
simulate command: seeded Monte Carlo deviation quantiles or interval coverage.
"""

import logging

from app.config import Settings
from app.models import SimulateRequest
from src.estimators import InfluenceKind
from src.simulation import (
    CoverageMethod,
    CoverageSpec,
    EstimatorKind,
    SimulationConfig,
    Tolerances,
    coverage,
    deviation_quantiles,
    parse_estimators,
    parse_source,
    write_coverage_csv,
    write_quantile_csv,
)
from . import add_output_flag, open_output

logger = logging.getLogger(__name__)


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(
        "simulate",
        help="Monte Carlo deviation quantiles or coverage as CSV",
        description=(
            "Draw reps samples of size n from the source, replication i from the "
            "stream (seed, i). With --estimators, emit estimator,level,deviation rows: "
            "the sorted |estimate - m| of each estimator at levels i/reps. With "
            "--coverage, emit one method,reps,hits,coverage,target row instead. "
            "Output is identical for any thread count."
        ),
    )
    parser.add_argument(
        "--source",
        required=True,
        help=(
            "weight:mean:sd,... Gaussian mixture, a published mixture name, "
            "worst3:v,eta (law on {-n eta, 0, n eta}) or "
            "worst4:v,kappa,q (law on {-n eta, -xi, xi, n eta} with kurtosis kappa)"
        ),
    )
    parser.add_argument("--n", required=True, type=int, help="sample size of each replication")
    parser.add_argument("--reps", required=True, type=int, help="number of replications R")
    parser.add_argument("--seed", required=True, type=int, help="unsigned 64-bit seed")
    parser.add_argument(
        "--epsilon",
        required=True,
        type=float,
        help="confidence parameter in (0, 1/2) passed to every estimator",
    )
    parser.add_argument(
        "--estimators",
        metavar="LIST",
        help=(
            "comma-separated estimators, name or name=param: "
            + ", ".join(k.value for k in EstimatorKind)
            + "; known-v=v and eps-free=v take a variance (default: the true v), "
            "lepski=V:rho:s a grid (default V=v, rho=1.05, s=95), "
            "kurtosis=kappa_max a kurtosis bound (default 6n/1000, or the true kappa below n=1000)"
        ),
    )
    parser.add_argument(
        "--coverage",
        metavar="METHOD",
        help=(
            "interval method: "
            + ", ".join(m.value for m in CoverageMethod)
            + "; lepski uses the true-variance halfwidth, variance=kappa_max:epsilon1[:p] "
            "checks |log v_hat - log v| <= zeta"
        ),
    )
    parser.add_argument(
        "--psi",
        choices=[k.value for k in InfluenceKind],
        default=InfluenceKind.NARROW.value,
        help="influence function of every M-estimator",
    )
    parser.add_argument(
        "--threads",
        type=int,
        help="worker threads (0 = one per CPU); overrides CATONI_THREADS",
    )
    add_output_flag(parser)
    parser.set_defaults(handler=run)


def build_config(request: SimulateRequest, settings: Settings) -> SimulationConfig:
    estimators = parse_estimators(request.estimators) if request.estimators else ()
    return SimulationConfig(
        source=parse_source(request.source, request.n),
        n=request.n,
        reps=request.reps,
        seed=request.seed,
        epsilon=request.epsilon,
        estimators=tuple(estimators),
        kind=request.psi,
        tolerances=Tolerances(mean=settings.mean_tolerance, variance=settings.variance_tolerance),
    )


def run(args, settings: Settings) -> None:
    request = SimulateRequest.from_args(args)
    config = build_config(request, settings)
    threads = request.threads if request.threads is not None else settings.threads
    logger.info(f"Simulating {config.reps} replications, seed {config.seed}")

    if request.coverage is not None:
        report = coverage(config, CoverageSpec.parse(request.coverage), threads)
        with open_output(request.output) as stream:
            write_coverage_csv([report], stream, settings.float_digits)
        return

    curves = deviation_quantiles(config, threads)
    with open_output(request.output) as stream:
        write_quantile_csv(curves, stream, settings.float_digits)
