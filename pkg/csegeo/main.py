"""
Main application module for csegeo.
"""

import argparse
import sys
from typing import List, Optional

from csegeo import __version__
from csegeo.cli import evaluate, export_colors, fit, lbo, normalize, softlabels, transfer, zoomout
from csegeo.cli.common import common_options
from csegeo.utils.errors import DataError, UsageError
from csegeo.utils.logger import log_error, log_info


class CliParser(argparse.ArgumentParser):
    """
    Argument parser that raises UsageError instead of exiting.
    """

    def error(self, message):
        raise UsageError(message)


def build_parser() -> CliParser:
    """
    Create the csegeo argument parser with every subcommand registered.

    Returns:
        CliParser
    """
    parser = CliParser(
        prog="csegeo",
        description="Continuous surface embeddings: spectral mesh geometry and functional maps",
    )
    parser.add_argument("--version", action="version", version=f"csegeo {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    parent = common_options()

    # Register subcommands
    for module in (lbo, zoomout, transfer, softlabels, fit, evaluate, export_colors, normalize):
        module.register(subparsers, parent)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the CLI.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        Exit code: 0 on success, 1 on usage errors, 2 on data errors
    """
    parser = build_parser()
    args = None
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        log_info(f"Running csegeo {args.command}")
        return args.handler(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"csegeo: error: {e}\n")
        return 1
    except DataError as e:
        log_error(f"csegeo {args.command} failed: {e}", exc_info=False)
        sys.stderr.write(f"csegeo: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
