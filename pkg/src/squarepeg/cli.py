"""Command-line front end.

Subcommands: ``solve`` (inscribed squares of a torus loop pair), ``verify``
(straight-circle model report), ``count`` (intersection bound for two
straight circles), ``pipeline`` (planar periodic curves end to end), and
``generate`` (seeded fixture files).  All outputs are byte-deterministic
for fixed inputs, flags, and seeds.

Exit codes: 0 success, 1 usage or input error, 2 mathematical failure
(no solutions, lost disjointness, or no convergence).
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import fixtures
from .curves import (
    CurveFormatError,
    DisjointnessLost,
    FourierCurve,
    PolylineCurve,
    curves_to_json,
    load_curves,
    min_distance,
)
from .model_verifier import (
    LinearCircle,
    geometric_intersection_count,
    hf_dimension_linear,
    lemma_report,
)
from .pipeline import NotConverged, PipelineConfig, render_svg, run
from .square_finder import NoSolutions, SolverConfig, solve_all
from .torus_geometry import wrap_unit

INPUT_ERROR = 1
MATH_FAILURE = 2


def _write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_json(path: str, obj):
    _write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Inscribed squares of periodic curve pairs on the square torus."""


def _fmt(x: float) -> str:
    return repr(round(float(x), 12))


def _torus_svg(f, g, corners) -> str:
    """Unit-torus plot: each loop one path (split at wraps), one square polygon."""
    ts = np.arange(512) / 512.0

    def path_for(loop) -> str:
        pts = loop.lift(ts)
        xs = wrap_unit(pts.real)
        ys = wrap_unit(pts.imag)
        cmds = []
        for i in range(len(ts)):
            jump = i > 0 and (
                abs(xs[i] - xs[i - 1]) > 0.5 or abs(ys[i] - ys[i - 1]) > 0.5
            )
            cmds.append(
                f"{'M' if i == 0 or jump else 'L'} {_fmt(xs[i])} {_fmt(ys[i])}"
            )
        return " ".join(cmds)

    square = " ".join(f"{_fmt(c.real)},{_fmt(c.imag)}" for c in corners)
    return "\n".join(
        [
            '<?xml version="1.0" encoding="UTF-8"?>',
            '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-0.25 -1.25 1.5 1.5">',
            '<g transform="scale(1,-1)" fill="none" stroke-width="0.004">',
            f'<path d="{path_for(f)}" stroke="#1f77b4"/>',
            f'<path d="{path_for(g)}" stroke="#d62728"/>',
            f'<polygon points="{square}" stroke="#2ca02c"/>',
            "</g>",
            "</svg>",
            "",
        ]
    )


@main.command()
@click.option("--curves", "curves_path", required=True, type=click.Path(exists=True))
@click.option("--grid", default=64, show_default=True, help="Seed grid resolution per axis.")
@click.option("--tol", default=1e-10, show_default=True, help="Residual acceptance tolerance.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--svg", "svg_path", default=None, type=click.Path())
def solve(curves_path, grid, tol, out_path, svg_path):
    """Find all inscribed squares of a disjoint torus loop pair."""
    try:
        f, g = load_curves(curves_path)
    except CurveFormatError as exc:
        _fail(INPUT_ERROR, str(exc))
    for name, curve in (("curves[0]", f), ("curves[1]", g)):
        if not isinstance(curve, FourierCurve) or curve.winding != (1, 0):
            _fail(INPUT_ERROR, f"{name}: solve expects fourier loops of class (1, 0)")
    if min_distance(f, g, mode="torus") <= 0.0:
        _fail(INPUT_ERROR, "curves not disjoint")
    cfg = SolverConfig(grid_resolution=grid, newton_tol=tol)
    try:
        sols = solve_all(f, g, cfg)
    except NoSolutions as exc:
        _fail(MATH_FAILURE, str(exc))
    geometric: list[tuple] = []
    for s in sols:
        key = tuple(sorted((round(c.real, 6), round(c.imag, 6)) for c in s.corners))
        if key not in geometric:
            geometric.append(key)
    _write_json(
        out_path,
        {
            "count": len(sols),
            "distinct_geometric_squares": len(geometric),
            "solutions": [s.to_dict() for s in sols],
        },
    )
    if svg_path:
        _write_text(svg_path, _torus_svg(f, g, sols[0].corners))
    click.echo(f"{len(sols)} solutions written to {out_path}")


@main.command()
@click.option("--alpha", required=True, type=float)
@click.option("--beta", required=True, type=float)
@click.option("--out", "out_path", required=True, type=click.Path())
def verify(alpha, beta, out_path):
    """Machine-check the straight-circle model identities at (alpha, beta)."""
    report = lemma_report(alpha, beta)
    _write_json(out_path, report)
    click.echo(
        f"pass={report['pass']} hf_product={report['hf_product']} "
        f"(report written to {out_path})"
    )
    if not report["pass"]:
        sys.exit(MATH_FAILURE)


def _parse_class(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'u,v', got {text!r}")
    return int(parts[0]), int(parts[1])


@main.command()
@click.option("--class1", "class1", required=True, help="Homology class 'u,v'.")
@click.option("--offset1", default=0.0, show_default=True, type=float)
@click.option("--class2", "class2", required=True, help="Homology class 'u,v'.")
@click.option("--offset2", default=0.0, show_default=True, type=float)
def count(class1, offset1, class2, offset2):
    """Print the intersection-count bound for two straight circles."""
    try:
        first = LinearCircle(_parse_class(class1), offset1)
        second = LinearCircle(_parse_class(class2), offset2)
    except ValueError as exc:
        _fail(INPUT_ERROR, str(exc))
    dim = hf_dimension_linear(first, second)
    u1, v1 = first.direction
    u2, v2 = second.direction
    if u1 * v2 - u2 * v1 != 0:
        crossings = geometric_intersection_count(first, second)
        if crossings != dim:
            _fail(
                MATH_FAILURE,
                f"determinant rule {dim} disagrees with crossing count {crossings}",
            )
    click.echo(str(dim))


@main.command()
@click.option("--curves", "curves_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--svg", "svg_path", default=None, type=click.Path())
def pipeline(curves_path, out_path, svg_path):
    """Run the full reduction on a vertically periodic polyline pair."""
    try:
        f, g = load_curves(curves_path)
    except CurveFormatError as exc:
        _fail(INPUT_ERROR, str(exc))
    try:
        report = run(f, g, PipelineConfig())
    except ValueError as exc:
        _fail(INPUT_ERROR, str(exc))
    except NotConverged as exc:
        _write_json(out_path, exc.report.to_dict())
        _fail(MATH_FAILURE, "pipeline did not converge (best-effort report written)")
    except (DisjointnessLost, NoSolutions) as exc:
        _fail(MATH_FAILURE, str(exc))
    _write_json(out_path, report.to_dict())
    if svg_path:
        _write_text(svg_path, render_svg(report, f, g))
    click.echo(
        f"converged square side {report.side!r} (report written to {out_path})"
    )


@main.command()
@click.option("--seed", required=True, type=int)
@click.option(
    "--family",
    required=True,
    type=click.Choice(sorted(fixtures.FAMILIES)),
)
@click.option("--out", "out_path", required=True, type=click.Path())
def generate(seed, family, out_path):
    """Write a reproducible curve-pair fixture file."""
    f, g = fixtures.generate(family, seed)
    _write_text(out_path, curves_to_json(f, g))
    click.echo(f"{family} pair for seed {seed} written to {out_path}")


if __name__ == "__main__":
    main()
