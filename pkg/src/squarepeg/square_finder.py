"""Find inscribed squares spanning two disjoint torus loops.

A parameter tuple (a1, a2, b1, b2) encodes a square whose corners are
f(a1), g(b1), g(b2), f(a2): the residual below vanishes exactly when
f(a2) = f(a1) + i*(g(b1) - f(a1)) and g(b2) = g(b1) + i*(g(b1) - f(a1))
on the torus.  Zeros are located by a corner-test prefilter over a 2D
seed grid followed by damped Newton refinement, then deduplicated and
classified by the Jacobian's smallest singular value.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .torus_geometry import (
    TorusPair,
    TorusPoint,
    circle_distance,
    lift_near,
    square_completion,
    torus_distance,
    wrap_half,
    wrap_half_complex,
    wrap_unit,
)

__all__ = [
    "NoSolutions",
    "BijectionViolated",
    "SquareParams",
    "SquareSolution",
    "SolverConfig",
    "residual",
    "jacobian",
    "solve_all",
    "to_intersection_point",
    "planar_square_error",
    "verify_square_planar",
]


class NoSolutions(Exception):
    """The solver found no roots; on valid disjoint loops this is a failure."""


class BijectionViolated(Exception):
    """A solution's corner tuple and its paired intersection point disagree."""


@dataclass(frozen=True)
class SquareParams:
    """Curve parameters of the four corners, each reduced mod 1."""

    a1: float
    a2: float
    b1: float
    b2: float

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            object.__setattr__(self, name, wrap_unit(getattr(self, name)))

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.b1, self.b2], dtype=float)


@dataclass(frozen=True)
class SquareSolution:
    """One root of the square condition.

    ``corners`` are consistent planar lifts in the order P1 = f(a1),
    P2 = g(b1), P3 = g(b2), P4 = f(a2); ``side`` is |P2 - P1|;
    ``degenerate_family`` marks roots whose Jacobian is rank deficient
    (members of a positive-dimensional solution family).
    """

    params: SquareParams
    corners: tuple[complex, complex, complex, complex]
    side: float
    residual_norm: float
    degenerate_family: bool
    jacobian_min_singular_value: float

    def to_dict(self) -> dict:
        return {
            "params": [self.params.a1, self.params.a2, self.params.b1, self.params.b2],
            "corners": [[c.real, c.imag] for c in self.corners],
            "side": float(self.side),
            "residual_norm": float(self.residual_norm),
            "degenerate_family": bool(self.degenerate_family),
            "jacobian_min_singular_value": float(self.jacobian_min_singular_value),
        }


@dataclass
class SolverConfig:
    grid_resolution: int = 64
    newton_tol: float = 1e-10
    newton_max_iter: int = 40
    dedup_radius: float = 1e-6
    degenerate_svd_threshold: float = 1e-6
    curve_samples: int = 2048
    prefilter_radius: float | None = None
    workers: int | None = None

    def __post_init__(self):
        for name in (
            "grid_resolution",
            "newton_tol",
            "newton_max_iter",
            "dedup_radius",
            "degenerate_svd_threshold",
            "curve_samples",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.prefilter_radius is not None and self.prefilter_radius <= 0:
            raise ValueError("prefilter_radius must be positive")


def _require_loops(f, g):
    for name, loop in (("f", f), ("g", g)):
        if getattr(loop, "winding", None) != (1, 0):
            raise ValueError(
                f"{name} must be a torus loop of winding class (1, 0), "
                f"got {getattr(loop, 'winding', None)}"
            )


def _residual_batch(f, g, params: np.ndarray) -> np.ndarray:
    a1, a2, b1, b2 = params.T
    fa1 = f.lift(a1)
    v = wrap_half_complex(g.lift(b1) - fa1)
    r1 = wrap_half_complex(f.lift(a2) - fa1 - 1j * v)
    r2 = wrap_half_complex(g.lift(b2) - g.lift(b1) - 1j * v)
    return np.stack([r1.real, r1.imag, r2.real, r2.imag], axis=1)


def _jacobian_batch(f, g, params: np.ndarray) -> np.ndarray:
    a1, a2, b1, b2 = params.T
    da1 = f.derivative(a1)
    da2 = f.derivative(a2)
    db1 = g.derivative(b1)
    db2 = g.derivative(b2)
    zero = np.zeros_like(da1)
    row1 = np.stack([(1j - 1) * da1, da2, -1j * db1, zero], axis=1)
    row2 = np.stack([1j * da1, zero, -(1 + 1j) * db1, db2], axis=1)
    out = np.empty((len(a1), 4, 4), dtype=float)
    out[:, 0, :] = row1.real
    out[:, 1, :] = row1.imag
    out[:, 2, :] = row2.real
    out[:, 3, :] = row2.imag
    return out


def residual(f, g, p: SquareParams) -> np.ndarray:
    """The four real components of the square condition at one parameter tuple.

    Differences of curve points are taken as minimal lattice representatives,
    so the value is the distance class of the defect and vanishes exactly when
    the tuple encodes an inscribed square on the torus.
    """
    return _residual_batch(f, g, p.as_array()[None, :])[0]


def jacobian(f, g, p: SquareParams) -> np.ndarray:
    """Analytic 4x4 Jacobian of :func:`residual` in (a1, a2, b1, b2)."""
    return _jacobian_batch(f, g, p.as_array()[None, :])[0]


class _TorusPointIndex:
    """Spatial hash over torus sample points supporting nearest-sample queries."""

    def __init__(self, points: np.ndarray, params: np.ndarray, cell: float):
        ncell = max(1, min(128, int(1.0 / cell)))
        self.ncell = ncell
        self.points = points
        self.params = params
        red = wrap_unit(points.real) + 1j * wrap_unit(points.imag)
        ix = np.minimum((red.real * ncell).astype(int), ncell - 1)
        iy = np.minimum((red.imag * ncell).astype(int), ncell - 1)
        cid = ix * ncell + iy
        members: list[list[int]] = [[] for _ in range(ncell * ncell)]
        for idx, c in enumerate(cid):
            members[c].append(idx)
        neighborhoods = []
        for cx in range(ncell):
            for cy in range(ncell):
                acc: list[int] = []
                for dx in (-1, 0, 1):
                    for dy in (-1, 0, 1):
                        acc.extend(members[((cx + dx) % ncell) * ncell + (cy + dy) % ncell])
                neighborhoods.append(acc)
        width = max(1, max(len(a) for a in neighborhoods))
        self._cand = np.zeros((ncell * ncell, width), dtype=int)
        self._mask = np.zeros((ncell * ncell, width), dtype=bool)
        for i, acc in enumerate(neighborhoods):
            self._cand[i, : len(acc)] = acc
            self._mask[i, : len(acc)] = True

    def nearest(self, queries: np.ndarray):
        """Distance and sample parameter of the nearest sample per query point."""
        qx = np.minimum((wrap_unit(queries.real) * self.ncell).astype(int), self.ncell - 1)
        qy = np.minimum((wrap_unit(queries.imag) * self.ncell).astype(int), self.ncell - 1)
        cid = qx * self.ncell + qy
        cand = self._cand[cid]
        mask = self._mask[cid]
        pts = self.points[cand]
        dx = queries.real[:, None] - pts.real
        dy = queries.imag[:, None] - pts.imag
        dx -= np.round(dx)
        dy -= np.round(dy)
        dist_sq = dx * dx + dy * dy
        dist_sq[~mask] = np.inf
        best = np.argmin(dist_sq, axis=1)
        rows = np.arange(len(queries))
        return np.sqrt(dist_sq[rows, best]), self.params[cand[rows, best]]


def _newton_batch(f, g, seeds: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Damped Newton refinement of a seed batch; returns the converged roots."""
    P = wrap_unit(seeds)
    F = _residual_batch(f, g, P)
    fnorm = np.linalg.norm(F, axis=1)
    alive = np.ones(len(P), dtype=bool)
    for _ in range(cfg.newton_max_iter):
        ids = np.where(alive & (fnorm >= cfg.newton_tol))[0]
        if len(ids) == 0:
            break
        J = _jacobian_batch(f, g, P[ids])
        step = -(np.linalg.pinv(J, rcond=1e-12) @ F[ids][:, :, None])[:, :, 0]
        scale = np.ones(len(ids))
        improved = np.zeros(len(ids), dtype=bool)
        best_p = P[ids].copy()
        best_fn = fnorm[ids].copy()
        for _halving in range(9):
            todo = ~improved
            if not todo.any():
                break
            cand = wrap_unit(P[ids[todo]] + scale[todo, None] * step[todo])
            fn_cand = np.linalg.norm(_residual_batch(f, g, cand), axis=1)
            better = fn_cand < best_fn[todo]
            rows = np.where(todo)[0][better]
            best_p[rows] = cand[better]
            best_fn[rows] = fn_cand[better]
            improved[rows] = True
            scale[~improved] *= 0.5
        P[ids] = best_p
        F[ids] = _residual_batch(f, g, best_p)
        fnorm[ids] = best_fn
        alive[ids[~improved]] = False
    good = fnorm < cfg.newton_tol
    return P[good]


def _param_distance(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(wrap_half(p - q) ** 2, axis=-1))


def _dedup(params: np.ndarray, radius: float) -> np.ndarray:
    order = np.lexsort((params[:, 3], params[:, 2], params[:, 1], params[:, 0]))
    kept = np.empty_like(params)
    count = 0
    for i in order:
        p = params[i]
        if count and float(np.min(_param_distance(kept[:count], p[None, :]))) <= radius:
            continue
        kept[count] = p
        count += 1
    return kept[:count].copy()


def _reduce_complex(z: np.ndarray) -> np.ndarray:
    return wrap_unit(z.real) + 1j * wrap_unit(z.imag)


def _lift_near_batch(reduced: np.ndarray, anchor: np.ndarray) -> np.ndarray:
    tx = reduced.real + np.ceil(anchor.real - reduced.real - 0.5)
    ty = reduced.imag + np.ceil(anchor.imag - reduced.imag - 0.5)
    return tx + 1j * ty


def _lift_corners_batch(f, g, params: np.ndarray):
    """Consistent planar corner lifts for a batch of (near-)solutions.

    The first corner is anchored at its canonical representative; the other
    three are lifted next to their positions predicted by the square
    relations, which keeps the chain single-valued even when a difference
    sits on the wrap boundary.
    """
    a1, a2, b1, b2 = params.T
    p1 = _reduce_complex(f.lift(a1))
    v = wrap_half_complex(g.lift(b1) - p1)
    p2 = p1 + v
    p4 = _lift_near_batch(_reduce_complex(f.lift(a2)), p1 + 1j * v)
    p3 = _lift_near_batch(_reduce_complex(g.lift(b2)), p2 + 1j * v)
    return p1, p2, p3, p4, np.abs(v)


def solve_all(f, g, cfg: SolverConfig | None = None) -> list[SquareSolution]:
    """All inscribed squares of a disjoint pair of winding-(1, 0) loops.

    Seeds come from a corner-test prefilter: for every (a1, b1) cell of the
    seed grid, the two corners the square condition predicts are located
    against dense curve samples via a spatial hash, and only pairs whose
    predicted corners land near the respective curves survive (completed to
    4D by the nearest sample parameters).  Survivors are polished by damped
    Newton, deduplicated by torus distance on parameters, and classified as
    degenerate-family members when the Jacobian loses rank.  Output is
    sorted by parameter tuple, so it is deterministic for fixed inputs.

    Raises :class:`NoSolutions` when nothing converged, which on a valid
    disjoint pair always indicates a configuration or resolution failure.
    """
    cfg = cfg or SolverConfig()
    _require_loops(f, g)

    ns = cfg.curve_samples
    ts = np.arange(ns) / ns
    f_samples = f.lift(ts)
    g_samples = g.lift(ts)
    speed = max(
        float(np.max(np.abs(f.derivative(ts)))),
        float(np.max(np.abs(g.derivative(ts)))),
    )
    grid = cfg.grid_resolution
    radius = cfg.prefilter_radius
    if radius is None:
        radius = 4.0 * speed / grid + 2.0 * speed / ns
    index_f = _TorusPointIndex(f_samples, ts, radius)
    index_g = _TorusPointIndex(g_samples, ts, radius)

    a_grid = (np.arange(grid) + 0.5) / grid
    fa = f.lift(a_grid)
    gb = g.lift(a_grid)
    v = wrap_half_complex(gb[None, :] - fa[:, None])
    corner_f = (fa[:, None] + 1j * v).ravel()
    corner_g = (gb[None, :] + 1j * v).ravel()
    d4, a2_guess = index_f.nearest(corner_f)
    d3, b2_guess = index_g.nearest(corner_g)
    keep = (d4 <= radius) & (d3 <= radius)
    a1_all = np.repeat(a_grid, grid)
    b1_all = np.tile(a_grid, grid)
    seeds = np.stack(
        [a1_all[keep], a2_guess[keep], b1_all[keep], b2_guess[keep]], axis=1
    )
    if len(seeds):
        seeds = np.unique(seeds, axis=0)

    workers = cfg.workers
    if workers is None:
        workers = int(os.environ.get("PEG_THREADS", "1"))
    workers = max(1, workers)
    chunks = [seeds[lo : lo + 2048] for lo in range(0, len(seeds), 2048)]
    roots: list[np.ndarray] = []
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            roots = list(pool.map(lambda c: _newton_batch(f, g, c, cfg), chunks))
    else:
        roots = [_newton_batch(f, g, c, cfg) for c in chunks]
    all_roots = np.concatenate(roots) if roots else np.empty((0, 4))
    if len(all_roots) == 0:
        raise NoSolutions("no square-condition roots converged; refine the grid")
    distinct = _dedup(all_roots, cfg.dedup_radius)

    res_norms = np.linalg.norm(_residual_batch(f, g, distinct), axis=1)
    min_svs = np.linalg.svd(_jacobian_batch(f, g, distinct), compute_uv=False)[:, -1]
    p1, p2, p3, p4, sides = _lift_corners_batch(f, g, distinct)
    solutions = [
        SquareSolution(
            params=SquareParams(*distinct[i]),
            corners=(complex(p1[i]), complex(p2[i]), complex(p3[i]), complex(p4[i])),
            side=float(sides[i]),
            residual_norm=float(res_norms[i]),
            degenerate_family=bool(min_svs[i] < cfg.degenerate_svd_threshold),
            jacobian_min_singular_value=float(min_svs[i]),
        )
        for i in range(len(distinct))
    ]
    solutions.sort(key=lambda s: (s.params.a1, s.params.a2, s.params.b1, s.params.b2))
    return solutions


def to_intersection_point(f, g, sol: SquareSolution, tol: float = 1e-8) -> TorusPair:
    """The torus-product point (f(a2), g(b2)) a solution corresponds to.

    A parameter tuple solves the square condition exactly when this point
    equals the square-completion image of (f(a1), g(b1)); the method
    checks both constructions against each other and raises
    :class:`BijectionViolated` if they disagree beyond ``tol``.
    """
    p = sol.params
    point = TorusPair(
        TorusPoint.from_complex(complex(f.lift(p.a2))),
        TorusPoint.from_complex(complex(g.lift(p.b2))),
    )
    completed = square_completion(
        TorusPair(
            TorusPoint.from_complex(complex(f.lift(p.a1))),
            TorusPoint.from_complex(complex(g.lift(p.b1))),
        )
    )
    err = max(
        torus_distance(point.first, completed.first),
        torus_distance(point.second, completed.second),
    )
    if err > tol:
        raise BijectionViolated(
            f"intersection point mismatch {err:.3e} exceeds {tol:.0e}"
        )
    return point


def planar_square_error(corners) -> float:
    """Worst defect of the square relations among four ordered corners,
    relative to the side length (infinite for a degenerate side)."""
    p1, p2, p3, p4 = corners
    v = p2 - p1
    side = abs(v)
    if side == 0:
        return math.inf
    defect = max(
        abs((p3 - p2) - 1j * v),
        abs((p4 - p3) + v),
        abs((p1 - p4) + 1j * v),
    )
    return defect / side


def verify_square_planar(sol: SquareSolution, rel_tol: float = 1e-8) -> bool:
    """True iff the lifted corners trace a nondegenerate square.

    Checks P2-P1 = v, P3-P2 = i v, P4-P3 = -v, P1-P4 = -i v for the single
    complex side v with |v| = side > 0, all within ``rel_tol`` relative to
    the side length.
    """
    p1, p2, _p3, _p4 = sol.corners
    side = abs(p2 - p1)
    if side <= 0 or sol.side <= 0:
        return False
    return (
        planar_square_error(sol.corners) <= rel_tol
        and abs(side - sol.side) <= rel_tol * side
    )
