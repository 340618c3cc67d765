"""
Command-line interface for dimlift.

Subcommands dismantle, lift, verify, counterexamples, export-dot and suite.
Documents go to stdout or --out; log lines go to stderr.
"""

import argparse
import logging
import os
import sys
import traceback
from pathlib import Path
from typing import Optional

from . import __version__
from .boolsem import SemDiagram
from .config import RunConfig, load_config
from .counterexamples import COUNTEREXAMPLES, run_counterexample
from .errors import (
    DimliftError,
    InputError,
    InvariantViolation,
    ParseError,
    ResourceError,
    UnsupportedInputError,
)
from .formats import (
    diagram_to_dot,
    lifting_to_dot,
    load_sample,
    poset_to_dot,
    read_json,
    sniff_kind,
    write_json,
)
from .lift import dislift, lifting_from_dict, verify_lifting
from .logging_utils import LogLevel, RunLogger, UserErrors
from .poset import Poset, search_dismantling
from .suites import SUITES, run_suite


class _RunLoggerBridgeHandler(logging.Handler):
    """Forwards stdlib `logging` records from the library to the RunLogger.

    Warnings and errors always come through; debug and info records only
    when the handler is created with a lower level (--verbose).
    """

    def __init__(self, run_logger: RunLogger, level: int = logging.WARNING):
        super().__init__(level=level)
        self._run_logger = run_logger

    def emit(self, record: logging.LogRecord) -> None:
        try:
            msg = self.format(record)
        except Exception:
            return
        level = LogLevel.from_levelno(record.levelno)
        context = record.name if level is LogLevel.DEBUG else None
        self._run_logger.log(level, msg, context)


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser with all CLI options."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", default=None, help="Path to a YAML config file")
    common.add_argument("--seed", type=int, default=None, help="Run seed (default: 0)")
    common.add_argument(
        "--max-dim",
        type=int,
        default=None,
        dest="max_dim",
        help="Cap on the dimension of any constructed space (env: DIMLIFT_MAX_DIM)",
    )
    common.add_argument(
        "--max-vars",
        type=int,
        default=None,
        dest="max_vars",
        help="Cap on free variables in a feasibility system (default: 12)",
    )
    common.add_argument("--out", "-o", default=None, help="Write the result to this file")
    common.add_argument(
        "--format",
        choices=["json", "dot"],
        default=None,
        dest="fmt",
        help="Output format (default: json)",
    )
    common.add_argument("--trials", type=int, default=None, help="Override the trial count")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable debug output")
    common.add_argument("--quiet", "-q", action="store_true", help="Quiet mode - only errors")
    common.add_argument("--no-color", action="store_true", help="Disable colored output")

    parser = argparse.ArgumentParser(
        prog="dimlift",
        description="Exact liftings of Boolean semilattice diagrams by ordered Q-vector spaces",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  dimlift dismantle sample:square_poset      # Removal order of doubly-irreducibles
  dimlift lift sample:square -o lift.json    # Lift a diagram and verify it
  dimlift verify sample:square lift.json     # Re-check a saved lifting
  dimlift export-dot sample:chain3           # Cover graph annotated with dimensions
  dimlift counterexamples nonsimpl-square    # Reproduce a counterexample suite
  dimlift suite dislift --seed 7             # Run an acceptance suite

Inputs are JSON files, or bundled samples written as sample:NAME.
Exit codes: 0 ok, 1 a check failed, 2 bad input, 3 unsupported input,
4 size cap exceeded, 5 internal error.
""",
    )
    parser.add_argument("--version", action="version", version=f"dimlift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dismantle", parents=[common], help="Find a dismantling order")
    p.add_argument("inputs", nargs=1, metavar="POSET", help="Poset or diagram JSON")

    p = sub.add_parser("lift", parents=[common], help="Lift a diagram and verify the lifting")
    p.add_argument("inputs", nargs=1, metavar="DIAGRAM", help="Diagram JSON")

    p = sub.add_parser("verify", parents=[common], help="Re-check a saved lifting")
    p.add_argument("inputs", nargs=2, metavar=("DIAGRAM", "LIFTING"))

    p = sub.add_parser("export-dot", parents=[common], help="Export the cover graph as DOT")
    p.add_argument("inputs", nargs="+", metavar="INPUT", help="Poset or diagram [lifting]")

    p = sub.add_parser(
        "counterexamples", parents=[common], help="Run a counterexample verification suite"
    )
    p.add_argument("name", choices=sorted(COUNTEREXAMPLES))

    p = sub.add_parser("suite", parents=[common], help="Run a seeded acceptance suite")
    p.add_argument("name", choices=sorted(SUITES))

    return parser


def print_header(logger: RunLogger, title: str):
    logger.info("━" * 50)
    logger.info(title)
    logger.info("━" * 50)


def print_summary(logger: RunLogger, passed: bool, lines: list[str]):
    logger.info("━" * 50)
    for line in lines:
        logger.info(f"  {line}")
    if passed:
        logger.success("All checks passed")
    else:
        logger.error("Some checks failed")
    logger.info(logger.format_summary())


def load_input(name: str) -> dict:
    if name.startswith("sample:"):
        return load_sample(name[len("sample:") :])
    return read_json(name)


def _load_diagram(name: str) -> SemDiagram:
    data = load_input(name)
    if sniff_kind(data) != "diagram":
        raise InputError(f"{name} is not a diagram")
    return SemDiagram.from_dict(data)


def _emit(config: RunConfig, logger: RunLogger, data: Optional[dict], dot: Optional[str]):
    text = dot if config.fmt == "dot" and dot is not None else write_json(data or {})
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8")
        logger.success(f"Wrote {config.out}")
    else:
        sys.stdout.write(text)


def cmd_dismantle(config: RunConfig, logger: RunLogger) -> int:
    data = load_input(config.inputs[0])
    poset = SemDiagram.from_dict(data).poset if sniff_kind(data) == "diagram" else None
    if poset is None:
        poset = Poset.from_dict(data)
    search = search_dismantling(poset, config.max_poset_elements)
    out = {"header": config.to_header(__version__)}
    if search.dismantlable:
        order = search.order
        out["verdict"] = "dismantlable"
        out["removal_order"] = order.names(poset)
        out["reinsertion_order"] = [poset.name(i) for i in order.reinsertion_sequence]
        logger.success(f"Removal order: {', '.join(order.names(poset))}")
        notes = {x: f"step {k}" for k, x in enumerate(order.removal_sequence)}
    else:
        out["verdict"] = "not dismantlable"
        out["stuck"] = [sorted(poset.name(i) for i in s) for s in search.stuck]
        logger.warning(f"Not dismantlable; {len(search.stuck)} stuck subposets")
        notes = None
    out["states_explored"] = search.states_explored
    _emit(config, logger, out, poset.to_dot(notes))
    return 0


def cmd_lift(config: RunConfig, logger: RunLogger) -> int:
    diagram = _load_diagram(config.inputs[0])
    logger.progress(f"Lifting a diagram on {diagram.poset.n} elements")
    result = dislift(diagram, config.caps)
    report = result.verify()
    header = config.to_header(__version__)
    header["dismantling_order"] = result.order.names(diagram.poset)
    out = {"header": header, **result.to_dict(), "verification": report.to_dict()}
    _emit(config, logger, out, lifting_to_dot(diagram, result.lifting))
    print_summary(
        logger,
        report.all_passed,
        [
            f"Cases: {''.join(result.cases)}",
            f"Total dimension: {sum(s.total_dim for s in result.lifting.objects)}",
            f"Checks: {len(report.checks) - len(report.failures)}/{len(report.checks)}",
        ],
    )
    return 0 if report.all_passed else 1


def cmd_verify(config: RunConfig, logger: RunLogger) -> int:
    diagram = _load_diagram(config.inputs[0])
    lifting, iotas = lifting_from_dict(load_input(config.inputs[1]), diagram)
    report = verify_lifting(diagram, lifting, iotas)
    for check in report.failures:
        logger.error(f"{check.name}: {check.detail}")
    _emit(config, logger, {"header": config.to_header(__version__), **report.to_dict()}, None)
    print_summary(logger, report.all_passed, [f"{len(report.checks)} checks"])
    return 0 if report.all_passed else 1


def cmd_export_dot(config: RunConfig, logger: RunLogger) -> int:
    if len(config.inputs) > 2:
        raise InputError("export-dot takes a poset or a diagram, and optionally a lifting")
    data = load_input(config.inputs[0])
    kind = sniff_kind(data)
    if kind == "poset":
        dot = poset_to_dot(Poset.from_dict(data))
    elif kind == "diagram":
        diagram = SemDiagram.from_dict(data)
        if len(config.inputs) == 2:
            lifting, _ = lifting_from_dict(load_input(config.inputs[1]), diagram)
            dot = lifting_to_dot(diagram, lifting)
        else:
            try:
                dot = lifting_to_dot(diagram, dislift(diagram, config.caps).lifting)
            except (UnsupportedInputError, ResourceError) as e:
                logger.warning(f"Annotating arities only: {e}")
                dot = diagram_to_dot(diagram)
    else:
        raise InputError("export-dot needs the diagram first when given a lifting")
    if config.out:
        Path(config.out).write_text(dot, encoding="utf-8")
        logger.success(f"Wrote {config.out}")
    else:
        sys.stdout.write(dot)
    return 0


def cmd_counterexamples(config: RunConfig, logger: RunLogger, name: str, show: bool) -> int:
    logger.progress(f"Verifying counterexample {name} with seed {config.seed}")
    report = run_counterexample(name, config.seed, config.trials, show=show)
    out = {
        "header": config.to_header(__version__),
        "counterexample": name,
        "report": report.to_dict(),
    }
    _emit(config, logger, out, None)
    print_summary(logger, report.passed, [report.summary])
    return 0 if report.passed else 1


def cmd_suite(config: RunConfig, logger: RunLogger, name: str, show: bool) -> int:
    logger.progress(f"Running {name} with seed {config.seed}")
    report = run_suite(name, config.seed, config.trials, config.caps, show=show)
    out = {"header": config.to_header(__version__), "report": report.to_dict()}
    _emit(config, logger, out, None)
    print_summary(logger, report.passed, [report.summary])
    return 0 if report.passed else 1


def main(argv: Optional[list[str]] = None):
    parser = create_parser()
    args = parser.parse_args(argv)

    logger = RunLogger(
        verbose=args.verbose,
        quiet=args.quiet,
        use_color=not args.no_color,
    )

    root_logger = logging.getLogger()
    level = logging.DEBUG if args.verbose else logging.WARNING
    for handler in [h for h in root_logger.handlers if isinstance(h, _RunLoggerBridgeHandler)]:
        root_logger.removeHandler(handler)
    root_logger.addHandler(_RunLoggerBridgeHandler(logger, level))
    if root_logger.level > level or root_logger.level == logging.NOTSET:
        root_logger.setLevel(level)

    try:
        if args.config and not Path(args.config).exists():
            logger.error(UserErrors.config_not_found(args.config))
            sys.exit(InputError.exit_code)
        config = RunConfig.resolve(args, load_config(args.config), os.environ)
        title = f"dimlift {args.command}"
        if getattr(args, "name", None):
            title += f" {args.name}"
        print_header(logger, title)

        if args.command == "dismantle":
            code = cmd_dismantle(config, logger)
        elif args.command == "lift":
            code = cmd_lift(config, logger)
        elif args.command == "verify":
            code = cmd_verify(config, logger)
        elif args.command == "export-dot":
            code = cmd_export_dot(config, logger)
        elif args.command == "counterexamples":
            code = cmd_counterexamples(config, logger, args.name, show=not args.quiet)
        else:
            code = cmd_suite(config, logger, args.name, show=not args.quiet)
    except KeyboardInterrupt:
        logger.warning("Cancelled by user")
        sys.exit(1)
    except DimliftError as e:
        if isinstance(e, ParseError):
            logger.error(UserErrors.parse_failed(str(e)))
        elif isinstance(e, UnsupportedInputError):
            source = args.inputs[0] if "inputs" in args else "input"
            logger.error(UserErrors.not_dismantlable(source))
            logger.debug(str(e))
        elif isinstance(e, ResourceError):
            logger.error(UserErrors.resource_cap(e.cap_name or "cap", e.limit or 0))
            logger.debug(str(e))
        elif isinstance(e, InvariantViolation):
            logger.error(UserErrors.invariant_violation(str(e)))
        else:
            logger.error(str(e))
        if args.verbose:
            logger.error(f"Traceback:\n{traceback.format_exc()}")
        sys.exit(e.exit_code)
    if code:
        sys.exit(code)


if __name__ == "__main__":
    main()
