"""
Console front end: ``liemodels <command> <document> [options]``.

Exit status is 0 when the command passes (or decides nothing), 1 when it
returns a failing verdict and 2 when it raises.
"""

import argparse
import logging
import sys

import salt.utils.files

from saltext.liemodels.utils.commands import CHECKS
from saltext.liemodels.utils.commands import COMMANDS
from saltext.liemodels.utils.commands import run
from saltext.liemodels.utils.exceptions import InputError
from saltext.liemodels.utils.exceptions import LieModelError
from saltext.liemodels.utils.parser import parse
from saltext.liemodels.utils.report import FORMATS
from saltext.liemodels.utils.report import emit

log = logging.getLogger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with salt.utils.files.fopen(path, "r", encoding="utf-8") as handle:
        return handle.read()


def build_parser():
    parser = argparse.ArgumentParser(
        prog="liemodels",
        description="Lie models of rational homotopy types over the rationals.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("document", help="input document, '-' for stdin")
    parser.add_argument("--cutoff", type=int, default=None, help="top degree kept (default 8)")
    parser.add_argument("--bound", type=int, default=16, help="word enumeration bound")
    parser.add_argument("--format", dest="fmt", choices=FORMATS, default="text")
    parser.add_argument(
        "--names",
        nargs="+",
        default=None,
        help="names for created generators, in order or as name@top,res",
    )
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--what", choices=CHECKS, default="square-zero")
    parser.add_argument("--tau", default=None, help="perturbation label or 'g -> expr; ...'")
    parser.add_argument("--tau2", default=None)
    parser.add_argument("--theta", default=None)
    parser.add_argument("--sigma", default=None)
    parser.add_argument("--target", default=None, help="document to perturb toward")
    parser.add_argument("--perturbations", default=None, help="perturbation-set document")
    parser.add_argument("--include-cutoff", action="store_true")
    parser.add_argument("--emit-model", action="store_true")
    parser.add_argument(
        "--log-level",
        default="warning",
        choices=("debug", "info", "warning", "error"),
    )
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper()),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        document = parse(_read(args.document), default_cutoff=args.cutoff)
        options = {
            "cutoff": args.cutoff,
            "bound": args.bound,
            "names": args.names,
            "seed": args.seed,
            "what": args.what,
            "tau": args.tau,
            "tau2": args.tau2,
            "theta": args.theta,
            "sigma": args.sigma,
            "include_cutoff": args.include_cutoff,
            "emit_model": args.emit_model,
        }
        for key in ("target", "perturbations"):
            path = getattr(args, key)
            options[key] = parse(_read(path), default_cutoff=args.cutoff) if path else None
        report = run(args.command, document, **options)
    except (InputError, LieModelError) as exc:
        log.debug("command failed", exc_info=True)
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: io-error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(emit(report, args.fmt))
    return EXIT_FAIL if report.verdict is False else EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
