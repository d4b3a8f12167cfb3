"""
Command-line entry point of the relaxation lab.

    python cli.py <subcommand> --config <file.json> [--dry-run] [--output-dir DIR]

Subcommands: simulate, reform-check, energy-monitor, rate-study, lp-analyze.
The result (or error) envelope is printed as JSON on standard output; logs
go to standard error. Exit codes: 0 ok, 1 numerical failure, 2 usage or
configuration error.
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from api.responses import error_payload, lab_error_payload, success_payload
from config import LOGGING_CONFIG
from services.experiment_service import SUBCOMMANDS, ExperimentService
from services.run_config import load_run_config
from utils.errors import ConfigError, LabError
from utils.logging_utils import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaxation-lab",
        description="Pseudo-spectral experiments on damped two-phase flow and its relaxation limit",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name, help=f"run the {name} experiment")
        sub.add_argument("--config", required=True, help="JSON run configuration")
        sub.add_argument("--dry-run", action="store_true", help="validate and echo the configuration only")
        sub.add_argument("--output-dir", default=None, help="override output_dir of the configuration")
        sub.add_argument("--log-level", default=LOGGING_CONFIG["level"],
                         choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    return parser


def _emit(document: Dict[str, Any]) -> None:
    sys.stdout.write(json.dumps(document, indent=2, sort_keys=True) + "\n")
    sys.stdout.flush()


def cli_main(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.
    
    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])
        
    Returns:
        Exit code: 0 ok, 1 numerical failure, 2 usage or configuration error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse has already printed usage or help
        return EXIT_USAGE if e.code else EXIT_OK

    setup_logging(log_level=args.log_level, log_file=LOGGING_CONFIG["log_file"])

    try:
        cfg = load_run_config(args.config)
        if args.dry_run:
            logger.info(f"Dry run of '{args.subcommand}': configuration is valid")
            _emit(success_payload({
                "dry_run": True,
                "subcommand": args.subcommand,
                "config": cfg.to_json_dict(),
                "config_hash": cfg.config_hash(),
            }))
            return EXIT_OK
        payload = ExperimentService(output_dir=args.output_dir).run(args.subcommand, cfg)
        _emit(success_payload(payload))
        return EXIT_OK
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        _emit(lab_error_payload(e))
        return EXIT_USAGE
    except LabError as e:
        logger.error(f"'{args.subcommand}' failed: {e}")
        _emit(lab_error_payload(e))
        return EXIT_NUMERICAL
    except Exception as e:
        logger.error(f"Unexpected error in '{args.subcommand}': {e}")
        _emit(error_payload(f"Unexpected error: {e}", "UNEXPECTED_ERROR"))
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
