"""End-to-end reduction: periodic planar curves in, a planar square out.

The stages: validate and rotate the vertically periodic inputs into the
internal horizontal convention, bound the strip half-width, pick the
rescale factor, then run a refinement schedule.  Each level smooths both
polylines, re-certifies embedding and disjointness, rescales onto the unit
torus, solves for inscribed squares, and lifts them back to the plane.  A
tracked square is matched across consecutive levels and convergence is
declared once its corners stop moving; this replaces a nonconstructive
limit with an explicit Cauchy check at a configured tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import (
    DisjointnessLost,
    EmbeddingLost,
    PolylineCurve,
    min_distance,
    mollify,
    rescale_to_torus,
    strip_halfwidth,
    transverse_extent,
)
from .square_finder import (
    SolverConfig,
    SquareSolution,
    planar_square_error,
    solve_all,
)
from .torus_geometry import TorusPoint, lift_near

__all__ = [
    "LiftInconsistent",
    "NotConverged",
    "PipelineConfig",
    "LevelRecord",
    "PipelineReport",
    "select_scale",
    "lift_square",
    "run",
    "render_svg",
]

#: the lifted corners of a valid solution stay within this distance of the
#: anchor corner (guaranteed once both loops live in the 1/16 strip)
LIFT_RADIUS = 0.25


class LiftInconsistent(Exception):
    """A corner has no planar lift near the anchor; the strip bound failed."""


class NotConverged(Exception):
    """The refinement schedule ran out before the tracked square settled.

    The best-effort report is attached as ``report``.
    """

    def __init__(self, report: "PipelineReport"):
        super().__init__("refinement schedule exhausted without convergence")
        self.report = report


@dataclass
class PipelineConfig:
    widths: tuple[float, ...] = (0.02, 0.01, 0.005, 0.0025)
    orders: tuple[int, ...] = (128, 256, 512, 1024)
    solver: SolverConfig = field(default_factory=SolverConfig)
    convergence_tol: float = 1e-6

    def __post_init__(self):
        if not self.widths or len(self.widths) != len(self.orders):
            raise ValueError("widths and orders must be nonempty and equally long")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be positive")


@dataclass
class LevelRecord:
    width: float
    order: int
    epsilon: float | None
    smoothing_error_f: float | None
    smoothing_error_g: float | None
    solutions: list[SquareSolution]
    tracked_square: tuple[complex, complex, complex, complex] | None
    movement: float | None
    skipped: str | None = None


@dataclass
class PipelineReport:
    lam: float
    epsilon: float
    n: int
    levels: list[LevelRecord]
    converged_square: tuple[complex, complex, complex, complex]
    side: float
    converged: bool

    def to_dict(self) -> dict:
        return {
            "lambda": float(self.lam),
            "epsilon": float(self.epsilon),
            "N": int(self.n),
            "converged": bool(self.converged),
            "side": float(self.side),
            "converged_square": [[c.real, c.imag] for c in self.converged_square],
            "levels": [
                {
                    "width": float(rec.width),
                    "order": int(rec.order),
                    "skipped": rec.skipped,
                    "epsilon": None if rec.epsilon is None else float(rec.epsilon),
                    "smoothing_error_f": None
                    if rec.smoothing_error_f is None
                    else float(rec.smoothing_error_f),
                    "smoothing_error_g": None
                    if rec.smoothing_error_g is None
                    else float(rec.smoothing_error_g),
                    "movement": None if rec.movement is None else float(rec.movement),
                    "tracked_square": None
                    if rec.tracked_square is None
                    else [[c.real, c.imag] for c in rec.tracked_square],
                    "solutions": [s.to_dict() for s in rec.solutions],
                }
                for rec in self.levels
            ],
        }


def select_scale(lam: float) -> int:
    """Smallest integer strictly greater than 16 * lam, at least 1."""
    if lam < 0 or not math.isfinite(lam):
        raise ValueError("strip half-width must be finite and nonnegative")
    return max(1, int(math.floor(16.0 * lam)) + 1)


def lift_square(sol: SquareSolution, n: int, *, rotate_back: bool = True):
    """Planar corners of a torus-scale solution, scaled back by ``n``.

    The first corner is anchored at its canonical lift in [0, 1)^2 and the
    other three are lifted to their lattice translate nearest the anchor.
    A corner further than 1/4 from the anchor violates the strip bound the
    lift relies on and raises :class:`LiftInconsistent`.  The result is
    multiplied by ``n`` and, when ``rotate_back`` is set, rotated back into
    the vertical-period frame of the original planar inputs.
    """
    anchor = TorusPoint.from_complex(sol.corners[0]).as_complex()
    lifted = [anchor]
    for corner in sol.corners[1:]:
        cand = lift_near(TorusPoint.from_complex(corner), anchor)
        if abs(cand - anchor) > LIFT_RADIUS:
            raise LiftInconsistent(
                f"corner lift {abs(cand - anchor):.4f} from anchor exceeds "
                f"{LIFT_RADIUS}; rescale factor too small or corrupt solution"
            )
        lifted.append(cand)
    rot = 1j if rotate_back else 1.0
    return tuple(rot * c * n for c in lifted)


def _normalize_square(square):
    """Translate a square by whole periods so its lowest corner has
    imaginary part in [0, 1); reports are then independent of period
    translations of the inputs."""
    shift = 1j * math.floor(min(c.imag for c in square))
    return tuple(c - shift for c in square)


def _square_sort_key(square):
    return tuple(sorted((c.real, c.imag) for c in square))


def _square_movement(a, b) -> float:
    return max(abs(x - y) for x, y in zip(a, b))


def run(f: PolylineCurve, g: PolylineCurve, cfg: PipelineConfig | None = None) -> PipelineReport:
    """Find a planar square inscribed in a pair of vertically periodic curves.

    Preconditions: both inputs are injective polylines with period (0, 1)
    and disjoint images.  Raises ValueError on bad inputs,
    :class:`DisjointnessLost` if no refinement level keeps the smoothed
    curves certifiably disjoint, and :class:`NotConverged` (with the
    best-effort report attached) when the schedule ends with the tracked
    square still moving.
    """
    cfg = cfg or PipelineConfig()
    for name, curve in (("f", f), ("g", g)):
        if not isinstance(curve, PolylineCurve):
            raise ValueError(f"{name} must be a periodic polyline")
        if curve.period != 1j:
            raise ValueError(f"{name} must have period (0, 1), got {curve.period}")
    if min_distance(f, g, mode="planar") <= 0.0:
        raise ValueError("curves not disjoint")

    lam = max(strip_halfwidth(f), strip_halfwidth(g))
    n = select_scale(lam)
    f_h = f.rotated(-1)
    g_h = g.rotated(-1)

    levels: list[LevelRecord] = []
    tracked = None
    epsilon = math.inf
    converged = False
    for width, order in zip(cfg.widths, cfg.orders):
        rec = LevelRecord(width, order, None, None, None, [], None, None)
        levels.append(rec)
        try:
            sm_f = mollify(f_h, width, order)
            sm_g = mollify(g_h, width, order)
        except EmbeddingLost as exc:
            rec.skipped = f"smoothing lost embedding: {exc}"
            continue
        rec.smoothing_error_f = sm_f.c0_error
        rec.smoothing_error_g = sm_g.c0_error
        eps_level = min_distance(sm_f.curve, sm_g.curve, mode="planar")
        if eps_level <= 0.0:
            rec.skipped = "smoothing lost disjointness"
            continue
        rec.epsilon = eps_level
        epsilon = min(epsilon, eps_level)

        loop_f = rescale_to_torus(sm_f.curve, n)
        loop_g = rescale_to_torus(sm_g.curve, n)
        extent = max(transverse_extent(loop_f), transverse_extent(loop_g))
        if extent >= 1.0 / 16.0:
            raise RuntimeError(
                f"rescaled transverse extent {extent:.4f} reached 1/16; "
                f"scale factor {n} is inconsistent with half-width {lam}"
            )

        sols = solve_all(loop_f, loop_g, cfg.solver)
        rec.solutions = sols
        squares = [_normalize_square(lift_square(s, n)) for s in sols]
        if tracked is None:
            choice = min(range(len(squares)), key=lambda i: _square_sort_key(squares[i]))
        else:
            choice = min(
                range(len(squares)), key=lambda i: _square_movement(squares[i], tracked)
            )
        rec.tracked_square = squares[choice]
        if tracked is not None:
            rec.movement = _square_movement(squares[choice], tracked)
        tracked = squares[choice]
        if rec.movement is not None and rec.movement < cfg.convergence_tol:
            converged = True
            break

    if tracked is None:
        raise DisjointnessLost(
            "every refinement level lost embedding or disjointness"
        )
    side = abs(tracked[1] - tracked[0])
    report = PipelineReport(
        lam=lam,
        epsilon=epsilon,
        n=n,
        levels=levels,
        converged_square=tracked,
        side=side,
        converged=converged,
    )
    if not converged:
        raise NotConverged(report)
    if planar_square_error(tracked) > 1e-8:
        raise RuntimeError("tracked square failed the planarity check")
    if side < epsilon - cfg.convergence_tol:
        raise RuntimeError(
            f"square side {side:.6g} fell below the distance bound {epsilon:.6g}"
        )
    return report


def _fmt(x: float) -> str:
    return repr(round(float(x), 12))


def render_svg(report: PipelineReport, f: PolylineCurve, g: PolylineCurve) -> str:
    """SVG plot of the two input curves over one window plus the square.

    The drawing covers x in [-lam-1, lam+1] and y in [0, N] in the inputs'
    vertical-period frame; curves are one path element each, the square a
    single polygon.
    """
    lam = report.lam
    n = report.n
    width = 2 * lam + 2

    def path_for(curve: PolylineCurve) -> str:
        pts = []
        for k in range(n + 1):
            shift = k * curve.period
            vertices = curve.vertices if k < n else curve.vertices[:1]
            pts.extend(v + shift for v in vertices)
        cmds = [f"{'M' if i == 0 else 'L'} {_fmt(p.real)} {_fmt(p.imag)}" for i, p in enumerate(pts)]
        return " ".join(cmds)

    square_pts = " ".join(
        f"{_fmt(c.real)},{_fmt(c.imag)}" for c in report.converged_square
    )
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(-lam - 1)} 0 {_fmt(width)} {n}">',
        f'<g transform="translate(0,{n}) scale(1,-1)" fill="none" stroke-width="{_fmt(0.01 * n)}">',
        f'<path d="{path_for(f)}" stroke="#1f77b4"/>',
        f'<path d="{path_for(g)}" stroke="#d62728"/>',
        f'<polygon points="{square_pts}" stroke="#2ca02c"/>',
        "</g>",
        "</svg>",
        "",
    ]
    return "\n".join(lines)
