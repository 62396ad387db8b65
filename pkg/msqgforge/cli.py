# cli.py

import argparse
import sys
from typing import List, Optional

from .config import RunConfig, load_config
from .display import Display
from .errors import (
    BandExceedsGrid,
    CFLViolation,
    ConfigError,
    ForgeError,
    InsufficientHistory,
    MissingTimeHalo,
    NumericalFault,
    OutsideBall,
    StrictModeFailure,
)
from .interface import Forge

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_NUMERICAL = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msqg-forge",
        description="Convex-integration iterates for stochastic momentum SQG on the torus",
    )
    parser.add_argument("command", nargs="?", choices=("run", "verify"), default="run",
                        help="run the construction (default) or the invariant suite")
    parser.add_argument("--config", help="TOML configuration file")
    parser.add_argument("--mode", choices=("additive", "multiplicative"), help="noise type")
    parser.add_argument("--stages", type=int, help="number of stage blocks Q")
    parser.add_argument("--grid", type=int, help="grid size N")
    parser.add_argument("--seed", type=int, help="noise seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--strict", action="store_true", default=None, help="turn reported failures into errors")
    parser.add_argument("--paths", type=int, help="Monte-Carlo path count for the survival table")
    parser.add_argument("--workers", type=int, help="FFT workers and thread-pool size")
    parser.add_argument("--horizon", type=float, help="cap on the construction window end time")
    parser.add_argument("--window-start", type=float, help="start time of the last stage window")
    parser.add_argument("--verify", action="store_true", help="same as the verify command")
    parser.add_argument("--list", action="store_true", help="with verify: print the invariant catalogue and exit")
    parser.add_argument("--quiet", action="store_true", help="suppress console tables")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """
    Load --config (or the defaults) and apply the command-line overrides.

    Raises:
        ConfigError: If the file or an override is invalid.
    """
    config = load_config(args.config) if args.config else RunConfig.from_dict()
    return config.with_overrides(
        mode=args.mode,
        stages=args.stages,
        grid=args.grid,
        seed=args.seed,
        out=args.out,
        strict=args.strict,
        paths=args.paths,
        workers=args.workers,
        horizon=args.horizon,
        window_start=args.window_start,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    display = Display(quiet=args.quiet)
    command = "verify" if args.verify else args.command

    if command == "verify" and args.list:
        Display().show_catalogue()
        return EXIT_OK

    try:
        config = resolve_config(args)
        forge = Forge(config, display=display)
        if command == "verify":
            report = forge.verify()
            return EXIT_OK if report.holds else EXIT_INVARIANT
        forge.run()
        return EXIT_OK
    except (ConfigError, BandExceedsGrid) as e:
        display.error(str(e))
        return EXIT_CONFIG
    except StrictModeFailure as e:
        display.error(f"strict mode: {e}")
        return EXIT_INVARIANT
    except (OutsideBall, CFLViolation, InsufficientHistory, MissingTimeHalo) as e:
        display.error(f"invariant violated: {e}")
        return EXIT_INVARIANT
    except NumericalFault as e:
        display.error(f"numerical fault: {e}")
        return EXIT_NUMERICAL
    except ForgeError as e:
        display.error(str(e))
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
