"""Command-line frontend: validate systems, estimate dimensions, dump series
as CSV, and render 2-d gaskets as SVG.

Exit codes: 0 success, 1 malformed input or estimator error, 2 hypothesis
(tiling) failure.  Artifacts written with --out get a JSON manifest sidecar
recording the exact flags; the artifacts themselves contain nothing
run-dependent, so repeated sequential runs are byte-identical.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .oracles import (
    grid_box_count,
    projective_orbit_cloud,
    sierpinski_cloud,
    to_equilateral,
)
from .series import (
    SeriesReport,
    counting_exponent,
    counting_function,
    de_leo_lower_bound,
    estimate_hausdorff,
    estimate_sigma,
    hole_series,
    norm_series,
    singular_series,
)
from .system import PRESETS, load_system, validate_tiling
from .words import MaxDepth, compose, MatrixProduct

CSV_HEADER = "kind,parameter,level,level_sum_log,cumulative"
SIERPINSKI_DIM = math.log(3.0) / math.log(2.0)
BOX_EXPONENTS = (4, 5, 6, 7, 8)
PALETTE = ("#4878a8", "#58a868", "#c07840", "#9868a8", "#a84848",
           "#48a0a0", "#a89038", "#7888c0")


def _cap_type(value: str) -> int:
    return int(float(value))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="projdim",
        description="Dimension estimates for self-projective simplex attractors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, out_help):
        grp = sp.add_mutually_exclusive_group(required=True)
        grp.add_argument("--preset", choices=sorted(PRESETS), help="built-in system")
        grp.add_argument("--config", metavar="PATH", help="JSON system description")
        sp.add_argument("--seed", type=int, default=0, help="RNG seed where sampling is involved")
        sp.add_argument("--sequential", action="store_true",
                        help="force single-threaded evaluation")
        sp.add_argument("--out", metavar="PATH", help=out_help)

    sp = sub.add_parser("validate", help="check the first-level tiling hypotheses")
    common(sp, "write the report to a file")

    sp = sub.add_parser("dimension", help="run a dimension estimator")
    common(sp, "write the backing series as CSV")
    sp.add_argument("--method", required=True,
                    choices=("sigma", "hausdorff", "deleo", "boxcount-oracle", "all"))
    sp.add_argument("--depth", type=int, default=12, help="word-tree truncation depth")
    sp.add_argument("--norm-cap", type=_cap_type, default=10_000, metavar="T",
                    help="largest norm cap for counting-based methods")
    sp.add_argument("--interval", type=float, nargs=2, metavar=("LO", "HI"),
                    help="search interval for the bisection methods")

    sp = sub.add_parser("series", help="dump a series as CSV")
    common(sp, "write the CSV to a file")
    sp.add_argument("--method", required=True,
                    choices=("hole", "norm", "singular", "counting"),
                    help="series kind")
    sp.add_argument("--param", type=float, default=None,
                    help="series parameter: t (hole), r (norm), or s (singular)")
    sp.add_argument("--depth", type=int, default=10)
    sp.add_argument("--norm-cap", type=_cap_type, default=1_000, metavar="T")

    sp = sub.add_parser("render", help="render the depth-n images as SVG (d = 2)")
    common(sp, "SVG output path (required)")
    sp.add_argument("--depth", type=int, default=4)

    return parser


def _manifest(args, outputs, parameters, started):
    return {
        "command": args.command,
        "source": args.preset if args.preset else args.config,
        "parameters": parameters,
        "seed": args.seed,
        "sequential": bool(args.sequential),
        "outputs": outputs,
        "version": __version__,
        "wall_time_s": round(time.perf_counter() - started, 6),
    }


def _write_manifest(args, out_path, parameters, started):
    path = out_path + ".manifest.json"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_manifest(args, [out_path], parameters, started), fh,
                  indent=2, sort_keys=True)
        fh.write("\n")


def _series_csv_lines(reports) -> list[str]:
    lines = [CSV_HEADER]
    for report in reports:
        cums = report.cumulative_sums()
        for lvl, lls, cum in zip(report.levels, report.level_log_sums, cums):
            lines.append("%s,%r,%d,%r,%r" % (report.kind, report.parameter,
                                             lvl, float(lls), float(cum)))
    return lines


def _emit_csv(args, reports, parameters, started) -> None:
    text = "\n".join(_series_csv_lines(reports)) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        _write_manifest(args, args.out, parameters, started)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    started = time.perf_counter()
    system = load_system(args.config if args.config else args.preset)
    report = validate_tiling(system, seed=args.seed)
    lines = [
        "system: %s (d = %d, %d generators, %d holes)"
        % (system.name or "<config>", system.d, system.m, system.num_holes),
        "volume ratios: %s" % " ".join("%.12f" % r for r in report.volume_ratios),
        "additivity defect: %.3e (%s)"
        % (report.additivity_defect, "ok" if report.additivity_ok else "FAIL"),
        "interior collisions: %d in %d samples (%s)"
        % (report.interior_collisions, report.samples,
           "ok" if report.disjoint_ok else "FAIL"),
        "holes non-degenerate: %s" % ("ok" if report.holes_nondegenerate else "FAIL"),
        "result: %s" % ("PASS" if report.passed else "FAIL"),
    ]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        _write_manifest(args, args.out, {"samples": report.samples}, started)
    return 0 if report.passed else 2


def _default_schedule(cap: int) -> list[int]:
    schedule = [10 ** k for k in range(1, 40) if 10 ** k < cap]
    schedule.append(cap)
    if len(schedule) < 4:
        raise ValueError("norm cap too small for a counting schedule (need >= 2000)")
    return schedule[-6:]


def _boxcount(system, seed):
    eps = [2.0 ** -k for k in BOX_EXPONENTS]
    gate = grid_box_count(sierpinski_cloud(seed=seed), eps)
    if abs(gate.slope - SIERPINSKI_DIM) > 0.05:
        raise ArithmeticError(
            "box-count calibration failed: reference slope %.4f vs %.4f"
            % (gate.slope, SIERPINSKI_DIM))
    if system.d != 2:
        raise ValueError("box-count oracle projects barycentric triples (d = 2 only)")
    cloud = to_equilateral(projective_orbit_cloud(system, seed=seed))
    report = grid_box_count(cloud, eps)
    return report, gate


def cmd_dimension(args) -> int:
    started = time.perf_counter()
    system = load_system(args.config if args.config else args.preset)
    d = system.d
    methods = ("sigma", "hausdorff", "deleo", "boxcount-oracle") \
        if args.method == "all" else (args.method,)
    rows = []
    reports = []
    for method in methods:
        if method == "sigma":
            est = estimate_sigma(system, tuple(args.interval) if args.interval
                                 else (-1.0, 0.0), args.depth)
            lo, hi = est.bracket
            rows.append(("sigma (d + root of hole-series growth)",
                         d + est.estimate, (d + lo, d + hi), est.truncation))
            reports.append(hole_series(system, est.estimate, MaxDepth(args.depth)))
        elif method == "hausdorff":
            est = estimate_hausdorff(system, tuple(args.interval) if args.interval
                                     else (1.05, 1.95), args.depth)
            rows.append(("hausdorff (root of singular-series growth)",
                         est.estimate, est.bracket, est.truncation))
            reports.append(singular_series(system, est.estimate, "s-1",
                                           MaxDepth(args.depth)))
        elif method == "deleo":
            rho = counting_exponent(system, _default_schedule(args.norm_cap))
            frag = de_leo_lower_bound(d, rho)
            rows.append(("deleo lower bound (rho = %.4f)" % rho.estimate,
                         frag.lower_bound, frag.lower_bracket, rho.truncation))
            reports.append(counting_function(system, args.norm_cap))
        else:
            box, gate = _boxcount(system, args.seed)
            rows.append(("boxcount-oracle (calibration slope %.4f)" % gate.slope,
                         box.slope, (box.slope - box.residual, box.slope + box.residual),
                         "eps=2^-%d..2^-%d" % (BOX_EXPONENTS[0], BOX_EXPONENTS[-1])))
            reports.append(SeriesReport(
                "counting-function", 0.0, tuple(BOX_EXPONENTS),
                tuple(math.log(c) for c in box.counts), "boxcount"))
    width = max(len(r[0]) for r in rows)
    for label, value, (lo, hi), trunc in rows:
        sys.stdout.write("%-*s  %.6f  [%.6f, %.6f]  (%s)\n"
                         % (width, label, value, lo, hi, trunc))
    if args.out:
        text = "\n".join(_series_csv_lines(reports)) + "\n"
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        _write_manifest(args, args.out,
                        {"method": args.method, "depth": args.depth,
                         "norm_cap": args.norm_cap,
                         "interval": list(args.interval) if args.interval else None},
                        started)
    return 0


def cmd_series(args) -> int:
    started = time.perf_counter()
    system = load_system(args.config if args.config else args.preset)
    if args.method == "hole":
        param = 0.0 if args.param is None else args.param
        report = hole_series(system, param, MaxDepth(args.depth))
    elif args.method == "norm":
        param = 0.0 if args.param is None else args.param
        report = norm_series(system, param, args.norm_cap)
    elif args.method == "singular":
        if args.param is None:
            raise ValueError("--param S is required for the singular series")
        report = singular_series(system, args.param, "s-2", MaxDepth(args.depth))
    else:
        report = counting_function(system, args.norm_cap)
    _emit_csv(args, [report],
              {"kind": args.method, "param": args.param, "depth": args.depth,
               "norm_cap": args.norm_cap}, started)
    return 0


def _render_svg(system, depth: int) -> str:
    size = 640.0
    height = size * math.sqrt(3.0) / 2.0
    corners = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])
    fill = PALETTE[depth % len(PALETTE)]
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %.4f %.4f">' % (int(size), int(math.ceil(height)), size, height),
        '<g fill="%s" stroke="#303030" stroke-width="0.25">' % fill,
    ]
    m = system.m
    stack = [MatrixProduct.identity(system.d + 1)]
    polys = []
    while stack:
        prod = stack.pop()
        if len(prod.word) == depth + 1:
            arr = prod.as_array()
            cols = arr / arr.sum(axis=0, keepdims=True)
            pts = cols.T @ corners
            polys.append((prod.word.letters, pts))
            continue
        for letter in range(m, 0, -1):
            stack.append(compose(prod, letter, system.generators))
    polys.sort(key=lambda item: item[0])
    for _, pts in polys:
        coords = " ".join("%.4f,%.4f" % (p[0] * size, (math.sqrt(3.0) / 2.0 - p[1]) * size)
                          for p in pts)
        lines.append('<polygon points="%s"/>' % coords)
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def cmd_render(args) -> int:
    started = time.perf_counter()
    system = load_system(args.config if args.config else args.preset)
    if system.d != 2:
        raise ValueError("render supports d = 2 only")
    if not args.out:
        raise ValueError("render requires --out PATH for the SVG file")
    if args.depth < 0:
        raise ValueError("depth must be >= 0")
    svg = _render_svg(system, args.depth)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
    _write_manifest(args, args.out, {"depth": args.depth}, started)
    sys.stdout.write("wrote %s (%d triangles)\n"
                     % (args.out, system.m ** (args.depth + 1)))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.sequential:
        os.environ["PROJDIM_THREADS"] = "1"
    handler = {
        "validate": cmd_validate,
        "dimension": cmd_dimension,
        "series": cmd_series,
        "render": cmd_render,
    }[args.command]
    try:
        return handler(args)
    except (ValueError, ArithmeticError, OSError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
