#!/usr/bin/env python3
"""
Command-line front end.

    pinball analyze   --catalog equilateral --itinerary 1,2,1,3
    pinball sweep     --catalog equilateral --itinerary 1,2,1,3 --lambda 0.9:1.1:41
    pinball search    --catalog equilateral --lambda 0.9 --seed 0
    pinball plot      --catalog equilateral --itinerary 1,2,1,3 --lambda 0.9 --out fig.svg
    pinball reproduce
    pinball slopes    --aspect 0.8660254037844386 --max-sum 50
    pinball slopes    --catalog "rectangle(2)"

Exit status: 0 success, 1 domain or I/O error, 2 reproduction failures,
64 usage error.
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .catalog import (
    catalog_names,
    export_cases_csv,
    format_outcomes,
    known_polygon,
    parse_catalog_name,
    reproduce,
)
from .config import load_config
from .dynamics import find_attracting_cycles
from .error_handler import ErrorHandler
from .exceptions import BadParameterError, PinballError
from .geometry import Polygon, load_polygon_file
from .itinerary import Itinerary
from .plotting import orbit_polylines, render_svg
from .stability import (
    CONTINUATION_HEADER,
    classify,
    continue_orbit,
    parse_lambda_grid,
    rectangle_admissible_slopes,
)
from .utils import format_number, format_table, setup_logger, write_output

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REPRODUCE_FAILED = 2
EXIT_USAGE = 64


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser that exits with EX_USAGE"""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_polygon_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--catalog", help="Catalog polygon, e.g. equilateral, rectangle(2), regular(5)")
    source.add_argument("--polygon", help="Vertex file: one 'x y' pair per line, anticlockwise")


def build_parser() -> UsageParser:
    parser = UsageParser(prog="pinball",
                         description="Lambda-stability of periodic orbits in polygonal billiards")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="Configuration file path")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
                        help="Override the configured log level")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    analyze = commands.add_parser("analyze", help="Stability report for one itinerary")
    _add_polygon_source(analyze)
    analyze.add_argument("--itinerary", required=True, help="Side word, e.g. 1,2,1,3")
    analyze.add_argument("--format", choices=["text", "json"], default="text")
    analyze.add_argument("--out", help="Output path (default stdout)")

    sweep = commands.add_parser("sweep", help="Continuation of the periodic point in lambda")
    _add_polygon_source(sweep)
    sweep.add_argument("--itinerary", required=True)
    sweep.add_argument("--lambda", dest="lam", help="Grid a:b:n (default from configuration)")
    sweep.add_argument("--out", help="CSV output path (default stdout)")

    search = commands.add_parser("search", help="Periodic cycles reached by random pinball orbits")
    _add_polygon_source(search)
    search.add_argument("--lambda", dest="lam", type=float, help="Contraction in (0, 1)")
    search.add_argument("--seed", type=int)
    search.add_argument("--samples", type=int)
    search.add_argument("--transient", type=int)
    search.add_argument("--max-period", type=int)
    search.add_argument("--out", help="Output path (default stdout)")

    plot = commands.add_parser("plot", help="SVG of the cylinder orbit and the pinball orbit")
    _add_polygon_source(plot)
    plot.add_argument("--itinerary", required=True)
    plot.add_argument("--lambda", dest="lam", type=float, default=0.9)
    plot.add_argument("--out", required=True, help="SVG output path")

    repro = commands.add_parser("reproduce", help="Check every known catalog case")
    repro.add_argument("--catalog", action="append", help="Restrict to these polygons (repeatable)")
    repro.add_argument("--cases-csv", help="Also write the case list as CSV")
    repro.add_argument("--out", help="Output path (default stdout)")

    slopes = commands.add_parser("slopes", help="Admissible cylinder slopes of a w x 1 rectangle")
    shape = slopes.add_mutually_exclusive_group(required=True)
    shape.add_argument("--aspect", type=float, help="Aspect ratio w > 0")
    shape.add_argument("--catalog", help="square or rectangle(w)")
    slopes.add_argument("--max-sum", type=int, default=50, help="Bound on p + q")
    slopes.add_argument("--out", help="Output path (default stdout)")
    return parser


def _polygon(args: argparse.Namespace) -> Polygon:
    if args.catalog:
        return known_polygon(args.catalog)[0]
    return load_polygon_file(args.polygon)


def _analyze(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    report = classify(_polygon(args), Itinerary.parse(args.itinerary),
                      margin=config["stability"]["strict_margin"])
    if args.format == "json":
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    else:
        text = report.format_text()
    write_output(text, args.out)
    return EXIT_OK


def _sweep(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    grid = parse_lambda_grid(args.lam or config["continuation"]["lambda_grid"])
    rows = continue_orbit(_polygon(args), Itinerary.parse(args.itinerary), grid)
    lines = [CONTINUATION_HEADER] + [",".join(row.csv_fields()) for row in rows]
    write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _search(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    settings = config["search"]
    polygon = _polygon(args)
    lam = args.lam if args.lam is not None else settings["lambda"]
    cycles = find_attracting_cycles(
        polygon, lam,
        n_samples=args.samples or settings["samples"],
        transient=args.transient if args.transient is not None else settings["transient"],
        max_period=args.max_period or settings["max_period"],
        seed=args.seed if args.seed is not None else settings["seed"],
        record_steps=settings["record_steps"],
        capture_tol=settings["capture_tolerance"],
        max_workers=config["max_workers"],
    )
    rows = []
    for word, segment in cycles:
        start = segment.points[0]
        rows.append([str(word), str(word.period), str(start.side),
                     format_number(start.s), format_number(start.theta)])
    text = format_table(["itinerary", "period", "side", "s", "theta"], rows)
    write_output(f"{text}{len(rows)} cycles at lambda={format_number(lam)}\n", args.out)
    return EXIT_OK


def _plot(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    if not args.lam > 0.0:
        raise BadParameterError(f"lambda must be positive, got {args.lam}")
    picture = orbit_polylines(_polygon(args), Itinerary.parse(args.itinerary), args.lam)
    render_svg(picture, args.out)
    return EXIT_OK


def _reproduce(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    names = args.catalog or catalog_names()
    outcomes = reproduce(names, max_workers=config["max_workers"])
    if args.cases_csv:
        export_cases_csv([o.case for o in outcomes], args.cases_csv)
    write_output(format_outcomes(outcomes), args.out)
    return EXIT_OK if all(o.passed for o in outcomes) else EXIT_REPRODUCE_FAILED


def _aspect(args: argparse.Namespace) -> float:
    if args.aspect is not None:
        return args.aspect
    base, params = parse_catalog_name(args.catalog)
    if base == "square":
        return 1.0
    if base == "rectangle":
        return float(params["w"])
    raise BadParameterError(f"{args.catalog} is not a rectangle", context={"catalog": args.catalog})


def _slopes(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    rows = [[str(s.p), str(s.q), format_number(s.slope)]
            for s in rectangle_admissible_slopes(_aspect(args), args.max_sum)]
    write_output(format_table(["p", "q", "slope"], rows), args.out)
    return EXIT_OK


COMMANDS = {
    "analyze": _analyze,
    "sweep": _sweep,
    "search": _search,
    "plot": _plot,
    "reproduce": _reproduce,
    "slopes": _slopes,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run one subcommand and return the exit status"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    handler = ErrorHandler("cli")
    try:
        config = load_config(args.config)
        setup_logger("pinball", args.log_level or config["log_level"], config["log_file"])
        with handler.timed(args.command, argv=list(argv or sys.argv[1:])):
            return COMMANDS[args.command](args, config)
    except (PinballError, OSError) as e:
        handler.handle_error(args.command, e, reraise=False)
        sys.stderr.write(f"pinball {args.command}: {e}\n")
        return EXIT_ERROR


def main(argv: Optional[List[str]] = None) -> None:
    """Console script entry point"""
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
