"""Command-line entry point: ``nemsim list | run | verify``."""

import argparse
import logging
import sys

from dotenv import load_dotenv
from pydantic import ValidationError

from nemsim import __version__
from nemsim.config import get_settings
from nemsim.errors import ConfigError, NemsimError
from nemsim.progress.events import capture_error, install_stderr_printer
from nemsim.runner.configfile import default_config, load_config
from nemsim.runner.engine import run_to_file
from nemsim.runner.registry import get_all_experiments
from nemsim.runner.verify import run_checks

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERIC = 2


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="nemsim",
        description="Pulse-level simulation of nanomechanical qubits coupled through a transmon.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="List registered experiments")

    run = sub.add_parser("run", help="Run one experiment and write its CSV table")
    run.add_argument("experiment", help="Experiment name (see 'nemsim list')")
    run.add_argument("--config", help="Flat key = value config file")
    run.add_argument("--out", help="Output directory (default: run.output_dir or NEMSIM_OUTPUT_DIR)")
    run.add_argument("--fast", action="store_true", default=None, help="Coarse grids, relaxed steps")
    run.add_argument("--workers", type=int, help="Worker processes (capped by NEMSIM_MAX_WORKERS)")

    verify = sub.add_parser("verify", help="Run the acceptance checks")
    verify.add_argument("--full", action="store_true", help="Include slow gate simulations")
    verify.add_argument("checks", nargs="*", help="Only run the named checks")
    return parser.parse_args(argv)


def _configure_logging() -> None:
    settings = get_settings()
    logging.basicConfig(
        level=settings.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    install_stderr_printer()


def cmd_list() -> int:
    for name, entry in get_all_experiments().items():
        marker = " (slow)" if entry.slow else ""
        print(f"{name:10s} {entry.title}{marker}")
        print(f"{'':10s} {entry.description}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    overrides = {"experiment": args.experiment, "fast": args.fast, "workers": args.workers}
    if args.config:
        cfg = load_config(args.config, **overrides)
    else:
        cfg = default_config(**overrides)
    if args.out:
        output_dir = args.out
    elif "run.output_dir" in cfg.sources:
        output_dir = cfg.output_dir
    else:
        output_dir = get_settings().output_dir
    path = run_to_file(cfg, output_dir)
    print(path)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_checks(full=args.full, names=args.checks or None)
    failed = [r for r in results if not r.passed]
    for result in results:
        status = "ok" if result.passed else "FAIL"
        print(f"[{status}] {result.name}: {result.detail}")
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_NUMERIC if failed else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    load_dotenv()
    _configure_logging()
    experiment = getattr(args, "experiment", "")
    try:
        if args.command == "list":
            return cmd_list()
        if args.command == "run":
            return cmd_run(args)
        return cmd_verify(args)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NemsimError as exc:
        logger.exception("%s failed", experiment or args.command)
        capture_error(experiment or args.command, exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
