"""Command-line entry point for the decomposable-norm laboratory.

    python -m app.main <command> [flags]
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from app.config import config
from app.errors import LabInputError, LabNumericalError
from app.lab.report import cmd_dec_norm, cmd_estimate, cmd_report, cmd_samples, cmd_verify, write_report
from app.lab.suites import SUITES, LabContext
from app.linalg.core import parse_exponent
from app.models.schemas import ExperimentReport
from app.sdp.problem import SdpOptions

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Master seed (CLI > env:LAB_SEED > default)")
    common.add_argument("--trials", type=int, default=None, help="Random trials per battery")
    common.add_argument("--restarts", type=int, default=None, help="Random restarts of the Schatten ascent")
    common.add_argument("--sdp-tol", type=float, default=None, help="Absolute/feasibility tolerance of the SDP engine")
    common.add_argument("--sdp-maxiter", type=int, default=None, help="Iteration cap of the SDP engine")
    common.add_argument("--tol-scale", type=float, default=None, help="Multiplier for every assertion tolerance")
    common.add_argument("--quick", action="store_true", help="Reduced trial counts and sizes")
    common.add_argument("--log-level", default=None, help="Logging level (default from LOG_LEVEL)")

    parser = argparse.ArgumentParser(prog="decomp-lab", description="Decomposable, cb and Schatten norms of maps")
    sub = parser.add_subparsers(dest="command", required=True)

    dec = sub.add_parser("dec-norm", parents=[common], help="Decomposable and cb norm of a map file")
    dec.add_argument("map_file")
    dec.add_argument("--p", type=parse_exponent, default=parse_exponent("inf"))
    dec.add_argument("--out", default=None, help="Directory for the witness dump")

    verify = sub.add_parser("verify", parents=[common], help="Run one verification battery")
    verify.add_argument("suite", choices=sorted(SUITES))
    verify.add_argument("--out", default=None, help="Also write the report JSON here")

    report = sub.add_parser("report", parents=[common], help="Run every battery and write JSON + CSV tables")
    report.add_argument("--out", required=True)

    samples = sub.add_parser("samples", parents=[common], help="Write the sample input files")
    samples.add_argument("--out", required=True)

    estimate = sub.add_parser("estimate", parents=[common], help="Lower bound for ||Id_d (x) T|| on S^p")
    estimate.add_argument("map_file")
    estimate.add_argument("--p", type=parse_exponent, required=True)
    estimate.add_argument("--d", type=int, default=1)
    return parser


def context_from_args(args: argparse.Namespace) -> LabContext:
    return LabContext(
        seed=config.LAB_SEED if args.seed is None else args.seed,
        trials=args.trials,
        restarts=config.LAB_RESTARTS if args.restarts is None else args.restarts,
        tol_scale=config.LAB_TOL_SCALE if args.tol_scale is None else args.tol_scale,
        options=SdpOptions.from_flags(args.sdp_tol, args.sdp_maxiter),
        quick=args.quick,
    )


def run(args: argparse.Namespace) -> ExperimentReport:
    ctx = context_from_args(args)
    if args.command == "dec-norm":
        return cmd_dec_norm(args.map_file, args.p, ctx, out_dir=args.out)
    if args.command == "verify":
        report = cmd_verify(args.suite, ctx)
        if args.out:
            write_report(Path(args.out) / f"verify-{args.suite}.json", report)
        return report
    if args.command == "report":
        return cmd_report(args.out, ctx)
    if args.command == "samples":
        return cmd_samples(args.out, ctx)
    return cmd_estimate(args.map_file, args.p, args.d, ctx)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, (args.log_level or config.LOG_LEVEL).upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    try:
        report = run(args)
    except LabInputError as e:
        logger.error(f"Input error in {args.command}: {e}", exc_info=True)
        return EXIT_INPUT
    except LabNumericalError as e:
        logger.error(f"Solver failure in {args.command}: {e}", exc_info=True)
        return EXIT_SOLVER
    except OSError as e:
        logger.error(f"File error in {args.command}: {e}", exc_info=True)
        return EXIT_INPUT

    print(report.model_dump_json(indent=2))
    if not report.passed:
        failed = [a.name for a in report.assertions if not a.passed]
        logger.error(f"{len(failed)} assertion(s) failed: {', '.join(failed)}")
        return EXIT_ASSERTION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
