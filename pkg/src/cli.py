"""
Command-line entry point for berrylab.

Usage:
    python -m src selfcheck {special|field|geometry}
    python -m src <experiment> [--config FILE] [--E E ...] [--n N] [--seed S] ...

Exit codes: 0 success, 1 failed checks or acceptance, 2 configuration or usage error.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from .checks import CheckGroup, get_check_registry
from .config import load_config
from .errors import ConfigurationError
from .montecarlo import run_experiment
from .state import ExperimentKind
from .utils import configure_logging


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="JSON config file")
    common.add_argument("--out", type=str, default=None, help="Output directory")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--E", type=float, nargs="+", default=None, help="Energies")
    common.add_argument("--n", type=int, default=None, help="Replications")
    common.add_argument("--M", type=int, default=None, help="Plane waves per realization")
    common.add_argument("--ppw", type=int, default=None, help="Grid points per wavelength")
    common.add_argument("--K", type=int, default=None, help="Dyadic partition level")
    common.add_argument("--slow", action="store_const", const=True, default=None,
                        help="Use full-size acceptance settings")
    common.add_argument("--dry-run", action="store_true", help="Validate and print the plan only")
    common.add_argument("--log-level", type=str, default=None)
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="berrylab",
                                     description="Random plane-wave simulation and verification lab")
    sub = parser.add_subparsers(dest="command", metavar="command")

    check = sub.add_parser("selfcheck", help="Run numerical self-checks")
    check.add_argument("group", choices=[g.value for g in CheckGroup])
    check.add_argument("--log-level", type=str, default=None)

    common = _common_flags()
    for kind in ExperimentKind:
        sub.add_parser(kind.value, parents=[common], help=f"Run the {kind.value} experiment")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "kind": args.command,
        "energies": args.E,
        "n_reps": args.n,
        "n_waves": args.M,
        "ppw": args.ppw,
        "K": args.K,
        "seed": args.seed,
        "threads": args.threads,
        "out_dir": args.out,
        "slow": args.slow,
    }


def _run_selfcheck(group: str) -> int:
    results = get_check_registry().run_group(CheckGroup(group))
    for result in results:
        print(result.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAILED


def _print_report(report: Dict[str, Any]) -> None:
    for check in report["checks"]:
        status = ("PASS" if check["passed"] else "FAIL") if check["enforced"] else "INFO"
        line = (f"{status} {check['name']}: observed={check['observed']:.6g} "
                f"target={check['target']:.6g} tolerance={check['tolerance']:.3g}")
        if check["note"]:
            line += f" ({check['note']})"
        print(line)
    for note in report["notes"]:
        print(f"note: {note}")


def _run_experiment(args: argparse.Namespace) -> int:
    try:
        cfg = load_config(args.config, _overrides(args))
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    result = run_experiment(cfg, dry_run=args.dry_run)
    for line in result["plan"]:
        print(line)
    if result["error_messages"]:
        for message in result["error_messages"]:
            print(f"error: {message}", file=sys.stderr)
        # failures before planning are configuration problems
        return EXIT_USAGE if not result["plan"] else EXIT_FAILED
    if args.dry_run:
        return EXIT_OK

    report = result["report"]
    _print_report(report)
    for name, path in result["outputs"].items():
        print(f"wrote {name}: {path}")
    return EXIT_OK if report["passed"] else EXIT_FAILED


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv and run one subcommand.

    Args:
        argv: Arguments without the program name; sys.argv[1:] when None

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        return EXIT_OK if e.code in (None, 0) else EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    configure_logging(args.log_level)
    if args.command == "selfcheck":
        return _run_selfcheck(args.group)
    return _run_experiment(args)


def main(argv: Optional[List[str]] = None) -> int:
    return dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
