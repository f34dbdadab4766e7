# -*- coding: utf-8 -*-
#
# Copyright (c) 2022 CSIRO Space and Astronomy.
#
# Distributed under the terms of the CSIRO Open Source Software Licence
# Agreement. See LICENSE for more info.

"""
minkowski-coapprox module main
(executed via `python3 -m minkowski_coapprox` or the `minkowski` script)
"""
import argparse
import dataclasses
import json
import logging
import sys
import textwrap
import typing

import minkowski_coapprox.report as report
from minkowski_coapprox.analysis import SuiteConfig, verify_theorems
from minkowski_coapprox.bisector import (
    emit_bisector_csv,
    emit_bisector_svg,
    sample_bisector,
)
from minkowski_coapprox.coapprox import (
    DEFAULT_TOL,
    SearchBudget,
    best_approx,
    coapprox_solve,
)
from minkowski_coapprox.gauge import (
    equivalence_constants,
    gauge_eval,
    is_norm,
    sym_norm_gauge,
)
from minkowski_coapprox.specfile import (
    dump_gauge,
    load_gauge,
    parse_flat,
    parse_vector,
)
from minkowski_coapprox.witness import (
    construct_witness,
    embed_chord_witness,
    extend_to_hyperplane,
    product_with_interval,
    verify_witness,
)

logger = logging.getLogger("minkowski_coapprox")

EXIT_OK = 0
EXIT_FAILED = 1
"""a check failed or gave up, or there is no witness to give"""
EXIT_USAGE = 2

GAUGE_HELP = textwrap.dedent(
    """\
    Gauge spec JSON file, or builtin:euclidean, builtin:l1, builtin:linf,
    builtin:ellipsoid:a11,a12,a22 or builtin:shifted:euclidean:0.3,0"""
)

Result = typing.Tuple[dict, list, int]
"""JSON payload, text renderables and exit code of a command"""


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--out", help="Write output to this file. Default: stdout"
    )
    common.add_argument(
        "--format",
        choices=("json", "text"),
        default="json",
        help="Output format. Default: json",
    )
    common.add_argument(
        "--tol",
        type=float,
        default=DEFAULT_TOL,
        help=f"Solver tolerance. Default: {DEFAULT_TOL}",
    )
    common.add_argument(
        "--seed", type=int, help="Random seed. Default: 0 (or config file)"
    )
    common.add_argument(
        "--max-rounds",
        type=int,
        help="Cutting-plane rounds. Default: 200 (or config file)",
    )
    common.add_argument(
        "--dim",
        type=int,
        help="Dimension for builtin gauges. Default: from the arguments",
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="-v for progress, -vv for solver detail",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    """Parser with one sub-parser per command"""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="minkowski",
        description="Best coapproximation in generalized Minkowski spaces.",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    def add(name, help_text, gauge=True):
        sub = commands.add_parser(
            name,
            parents=[common],
            help=help_text,
            description=help_text,
            formatter_class=argparse.RawTextHelpFormatter,
        )
        if gauge:
            sub.add_argument("--gauge", required=True, help=GAUGE_HELP)
        return sub

    sub = add("eval", "Evaluate the gauge at a point")
    sub.add_argument("--point", required=True, help="e.g. 3,4 or --point=-3,4")

    for name, help_text in (
        ("coapprox", "Best coapproximation of a point on a flat"),
        ("bestapprox", "Best approximation of a point on a flat"),
    ):
        sub = add(name, help_text)
        sub.add_argument(
            "--flat",
            required=True,
            help="base=0,0;dirs=1,0|0,1, a JSON object or a JSON file",
        )
        sub.add_argument(
            "--point", required=True, help="e.g. 0.5,-1 or --point=-0.5,1"
        )

    sub = add("witness", "Construct and verify a chord witness (2D)")
    sub.add_argument(
        "--emit-gauge", help="Also write the gauge spec JSON to this file"
    )
    sub.add_argument(
        "--extend",
        action="store_true",
        help="Extend the witness line to a plane of the product gauge",
    )

    sub = add("bisector", "Sample the bisector of two points (2D)")
    sub.add_argument("--x", required=True, help="First site, e.g. --x=-1,0")
    sub.add_argument("--y", required=True, help="Second site, e.g. --y=1,0")
    sub.add_argument(
        "--window",
        default="-4,-4,4,4",
        help="--window=xmin,ymin,xmax,ymax. Default: -4,-4,4,4",
    )
    sub.add_argument(
        "--resolution", default="256,256", help="nx,ny. Default: 256,256"
    )
    sub.add_argument("--band-tol", type=float, help="Default: automatic")
    sub.add_argument(
        "--reverse",
        action="store_true",
        help="Use the reversed gauge γ(-x)",
    )
    sub.add_argument("--svg", help="Write an SVG picture to this file")
    sub.add_argument("--csv", help="Write the labelled grid to this file")

    sub = add("constants", "Equivalence constants of two gauges")
    sub.add_argument(
        "--gauge2",
        help="Second gauge. Default: symmetrized norm of --gauge",
    )

    sub = add("verify", "Run the verification suites", gauge=False)
    sub.add_argument("--config", help="Suite config JSON file")
    sub.add_argument(
        "--suites", help="Comma-separated suite names. Default: all"
    )
    sub.add_argument(
        "--workers", type=int, help="Suites run concurrently. Default: 1"
    )
    sub.add_argument(
        "--time",
        action="store_true",
        help="Include wall time in the report (not reproducible)",
    )
    return parser


def _budget(args) -> SearchBudget:
    fields = {"seed": args.seed or 0}
    if args.max_rounds is not None:
        fields["max_rounds"] = args.max_rounds
    return SearchBudget(**fields)


def _problem(args):
    point = parse_vector(args.point, args.dim)
    flat = parse_flat(args.flat, point.size)
    return load_gauge(args.gauge, point.size), flat, point


def cmd_eval(args) -> Result:
    """γ at a point"""
    point = parse_vector(args.point, args.dim)
    value = gauge_eval(load_gauge(args.gauge, point.size), point)
    return {"value": value}, [report.generate_value_table(value)], EXIT_OK


def cmd_coapprox(args) -> Result:
    """Undecided is an answer, not an error"""
    g, flat, y = _problem(args)
    result = coapprox_solve(g, flat, y, args.tol, _budget(args))
    return (
        result.to_dict(),
        [report.generate_coapprox_table(result)],
        EXIT_OK,
    )


def cmd_bestapprox(args) -> Result:
    g, flat, y = _problem(args)
    point, distance = best_approx(g, flat, y)
    return (
        {"point": point.tolist(), "distance": distance},
        [report.generate_best_approx_table(point.tolist(), distance)],
        EXIT_OK,
    )


def cmd_witness(args) -> Result:
    """Construct, verify and optionally extend a chord witness"""
    g = load_gauge(args.gauge, 2)
    if args.emit_gauge:
        dump_gauge(g, args.emit_gauge)
        logger.info(f"Gauge spec written to {args.emit_gauge}")
    if is_norm(g):
        reason = "gauge is a norm: every chord through 0 is a diameter"
        logger.warning(f"No chord witness: {reason}")
        return (
            {"found": False, "witness": None, "reason": reason},
            [report.generate_no_witness_table(reason)],
            EXIT_FAILED,
        )
    budget = _budget(args)
    witness = construct_witness(g)
    checked = verify_witness(g, witness, args.tol, budget)
    payload = {
        "found": True,
        "witness": witness.to_dict(),
        "verification": checked.to_dict(),
    }
    tables = [
        report.generate_witness_table(witness),
        report.generate_verification_table(checked),
    ]
    if args.extend:
        line, target = embed_chord_witness(witness)
        separation = extend_to_hyperplane(
            product_with_interval(g), line, target, args.tol, budget
        )
        payload["separation"] = separation.to_dict()
        tables.append(report.generate_separation_table(separation))
    return payload, tables, EXIT_OK if checked.ok else EXIT_FAILED


def cmd_bisector(args) -> Result:
    """Sample, summarise and emit the requested files"""
    g = load_gauge(args.gauge, 2)
    corners = parse_vector(args.window, 4)
    resolution = parse_vector(args.resolution, 2)
    if not all(float(n).is_integer() for n in resolution):
        raise ValueError(f"Resolution '{args.resolution}' must be integers")
    sample = sample_bisector(
        g,
        parse_vector(args.x, 2),
        parse_vector(args.y, 2),
        (corners[:2], corners[2:]),
        (int(resolution[0]), int(resolution[1])),
        band_tol=args.band_tol,
        reverse=args.reverse,
    )
    if args.svg:
        emit_bisector_svg(sample, args.svg)
    if args.csv:
        emit_bisector_csv(sample, args.csv)
    summary = sample.summary()
    return summary, [report.generate_bisector_table(summary)], EXIT_OK


def cmd_constants(args) -> Result:
    g = load_gauge(args.gauge, args.dim)
    if args.gauge2:
        other = load_gauge(args.gauge2, g.dim)
    else:
        other = sym_norm_gauge(g)
    constants = equivalence_constants(g, other)
    return (
        dataclasses.asdict(constants),
        [report.generate_constants_table(constants)],
        EXIT_OK,
    )


def cmd_verify(args) -> Result:
    """Config file first, then command-line overrides"""
    config = SuiteConfig.from_json(args.config) if args.config else None
    config = config or SuiteConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.max_rounds is not None:
        overrides["max_rounds"] = args.max_rounds
    if args.tol != DEFAULT_TOL:
        overrides["tol"] = args.tol
    if args.suites:
        overrides["suites"] = tuple(
            s.strip() for s in args.suites.split(",") if s.strip()
        )
    if args.workers is not None:
        overrides["workers"] = args.workers
    config = dataclasses.replace(config, **overrides)
    result = verify_theorems(config)
    return (
        result.to_dict(include_time=args.time),
        report.suite_renderables(result),
        EXIT_OK if result.passed else EXIT_FAILED,
    )


COMMANDS = {
    "eval": cmd_eval,
    "coapprox": cmd_coapprox,
    "bestapprox": cmd_bestapprox,
    "witness": cmd_witness,
    "bisector": cmd_bisector,
    "constants": cmd_constants,
    "verify": cmd_verify,
}


def _write(args, payload: dict, renderables: list):
    stream = sys.stdout
    if args.out:
        try:
            stream = open(args.out, "w", encoding="utf-8")
        except OSError as err:
            raise OSError(f"Cannot write output to {args.out}: {err}") from err
    try:
        if args.format == "text":
            report.render_text(renderables, stream)
        else:
            # repr floats: shortest round-trip decimal
            stream.write(json.dumps(payload, indent=2) + "\n")
    finally:
        if stream is not sys.stdout:
            stream.close()


def run(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    """
    Parse arguments, run one command and write its output.

    :return: exit code, 0 on success, 1 on failed checks, 2 on usage errors
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exit_request:
        return int(exit_request.code or 0)

    display_log_handler = logging.StreamHandler(sys.stderr)
    display_log_handler.setFormatter(
        logging.Formatter("%(levelname)s: %(message)s")
    )
    logger.addHandler(display_log_handler)
    levels = {0: logging.WARNING, 1: logging.INFO}
    logger.setLevel(levels.get(args.verbose, logging.DEBUG))
    try:
        payload, renderables, code = COMMANDS[args.command](args)
        _write(args, payload, renderables)
    except (ValueError, OSError) as err:
        logger.error(f"{err}")
        return EXIT_USAGE
    except RuntimeError as err:
        # includes WitnessUndecided
        logger.error(f"{args.command} failed: {err}")
        return EXIT_FAILED
    finally:
        logger.removeHandler(display_log_handler)
    return code


def main():
    """minkowski CLI main function"""
    sys.exit(run())


if __name__ == "__main__":
    main()
