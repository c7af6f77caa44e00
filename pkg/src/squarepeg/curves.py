"""Periodic planar curves and smooth torus loops.

Two concrete representations are provided: trigonometric-polynomial loops
(:class:`FourierCurve`) and periodic polylines (:class:`PolylineCurve`).
On top of them sit the geometric utilities the solver pipeline needs:
kernel smoothing with a certified sup-norm error, certified image-distance
lower bounds, embedding certificates, the height invariant that classifies
a degree-(1,0) loop up to area-preserving isotopy, and rescaling of a
periodic planar curve onto the unit torus.

Convention: internally every torus loop advances by +1 in the real
direction per unit parameter (winding class (1, 0)).  Planar inputs that
are periodic in the imaginary direction are rotated by a quarter turn
(multiplication by -i) on ingestion and results are rotated back.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np
from scipy.special import spherical_jn

from .torus_geometry import TorusPoint, wrap_half, wrap_unit

__all__ = [
    "EmbeddingLost",
    "DisjointnessLost",
    "CurveFormatError",
    "TorusLoop",
    "FourierCurve",
    "PolylineCurve",
    "RescaledLoop",
    "CurveInvariants",
    "MollifyResult",
    "hamiltonian_height",
    "mollify",
    "check_embedded",
    "min_distance",
    "strip_halfwidth",
    "rescale_to_torus",
    "transverse_extent",
    "load_curves",
    "curve_to_spec",
    "curves_to_json",
]

TWO_PI = 2.0 * math.pi

#: normalization of the smoothing kernel (35/32)(1 - x^2)^3 on [-1, 1]
_KERNEL_NORM = 35.0 / 32.0
#: integral of |x| against the unit-width kernel
_KERNEL_ABS_MOMENT = 35.0 / 128.0


class EmbeddingLost(Exception):
    """A curve operation produced (or could not certify) an embedded curve."""


class DisjointnessLost(Exception):
    """A curve pair stopped being certifiably disjoint."""


class CurveFormatError(ValueError):
    """A curve input file violates the expected schema."""


@runtime_checkable
class TorusLoop(Protocol):
    """A smooth loop on the torus: lift, derivative, and winding class."""

    winding: tuple[int, int]

    def lift(self, t): ...

    def derivative(self, t): ...


def _winding_complex(winding: tuple[int, int]) -> complex:
    return complex(winding[0], winding[1])


class FourierCurve:
    """A loop t -> w*t + sum_k (c_k cos(2 pi k t) + s_k sin(2 pi k t)).

    ``w`` is the complex winding vector (the lift advances by ``w`` per unit
    parameter) and the coefficients are complex, so the curve is a general
    trigonometric polynomial in the plane.  Construction verifies that the
    derivative never vanishes on a dense grid; full self-intersection
    certification is separate (:func:`check_embedded`).
    """

    def __init__(
        self,
        winding: tuple[int, int],
        cos_coeffs,
        sin_coeffs,
        *,
        min_speed: float = 1e-9,
        speed_samples: int = 2048,
    ):
        u, v = int(winding[0]), int(winding[1])
        self.winding: tuple[int, int] = (u, v)
        cos_arr = np.atleast_1d(np.asarray(cos_coeffs, dtype=complex))
        sin_arr = np.atleast_1d(np.asarray(sin_coeffs, dtype=complex))
        n = max(len(cos_arr), len(sin_arr), 1)
        self.cos_coeffs = np.zeros(n, dtype=complex)
        self.sin_coeffs = np.zeros(n, dtype=complex)
        self.cos_coeffs[: len(cos_arr)] = cos_arr
        self.sin_coeffs[: len(sin_arr)] = sin_arr
        self.sin_coeffs[0] = 0.0  # sin(0) term has no effect; keep it canonical
        if not np.all(np.isfinite(self.cos_coeffs)) or not np.all(
            np.isfinite(self.sin_coeffs)
        ):
            raise ValueError("non-finite Fourier coefficient")
        self.order = n - 1
        self._k = np.arange(n, dtype=float)
        ts = np.arange(speed_samples) / speed_samples
        speeds = np.abs(self.derivative(ts))
        if speeds.min() <= min_speed:
            raise ValueError(
                f"curve derivative vanishes (min speed {speeds.min():.3e} "
                f"<= {min_speed:.0e} on a {speed_samples}-point grid)"
            )

    def lift(self, t):
        """Planar lift at parameter t (scalar or array)."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        ang = TWO_PI * ts[:, None] * self._k[None, :]
        vals = (
            _winding_complex(self.winding) * ts
            + np.cos(ang) @ self.cos_coeffs
            + np.sin(ang) @ self.sin_coeffs
        )
        if np.ndim(t) == 0:
            return complex(vals[0])
        return vals

    def derivative(self, t):
        """d/dt of the lift at parameter t (scalar or array)."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        ang = TWO_PI * ts[:, None] * self._k[None, :]
        wk = TWO_PI * self._k
        vals = (
            _winding_complex(self.winding)
            - np.sin(ang) @ (wk * self.cos_coeffs)
            + np.cos(ang) @ (wk * self.sin_coeffs)
        )
        if np.ndim(t) == 0:
            return complex(vals[0])
        return vals

    def point(self, t: float) -> TorusPoint:
        return TorusPoint.from_complex(self.lift(float(t)))

    def speed_bound(self) -> float:
        """Upper bound on |derivative| from the coefficient sums."""
        wk = TWO_PI * self._k
        return abs(_winding_complex(self.winding)) + float(
            np.sum(wk * (np.abs(self.cos_coeffs) + np.abs(self.sin_coeffs)))
        )

    def second_derivative_bound(self) -> float:
        wk2 = (TWO_PI * self._k) ** 2
        return float(np.sum(wk2 * (np.abs(self.cos_coeffs) + np.abs(self.sin_coeffs))))

    def reparameterized(self, shift: float) -> "FourierCurve":
        """The same curve traversed as t -> self(t + shift)."""
        ph_cos = np.cos(TWO_PI * self._k * shift)
        ph_sin = np.sin(TWO_PI * self._k * shift)
        new_cos = self.cos_coeffs * ph_cos + self.sin_coeffs * ph_sin
        new_sin = -self.cos_coeffs * ph_sin + self.sin_coeffs * ph_cos
        new_cos[0] += _winding_complex(self.winding) * shift
        return FourierCurve(self.winding, new_cos, new_sin)

    def rotated(self, quarter_turns: int) -> "FourierCurve":
        """The curve multiplied by i^quarter_turns (a lattice-preserving isometry)."""
        rot = 1j ** (quarter_turns % 4)
        w = _winding_complex(self.winding) * rot
        return FourierCurve(
            (round(w.real), round(w.imag)),
            self.cos_coeffs * rot,
            self.sin_coeffs * rot,
        )


class PolylineCurve:
    """A periodic piecewise-linear curve: one period of vertices plus the
    translation applied per period.

    Parameterization is uniform per segment: with n vertices, vertex i sits
    at parameter i/n and evaluate(t + 1) = evaluate(t) + period.
    """

    def __init__(self, vertices, period, *, injectivity_check: bool = True):
        pts = np.asarray(
            [complex(p[0], p[1]) if not isinstance(p, complex) else p for p in vertices],
            dtype=complex,
        )
        if pts.ndim != 1 or len(pts) < 1:
            raise ValueError("polyline needs at least one vertex")
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite polyline vertex")
        per = complex(period[0], period[1]) if not isinstance(period, complex) else period
        if per == 0:
            raise ValueError("polyline period vector must be nonzero")
        closed = np.concatenate([pts, [pts[0] + per]])
        if np.any(np.abs(np.diff(closed)) == 0.0):
            raise ValueError("consecutive polyline vertices must be distinct")
        self.vertices = pts
        self.period = per
        self.winding: tuple[int, int] = (round(per.real), round(per.imag))
        if injectivity_check:
            self._check_injective()

    def _check_injective(self):
        # exact segment-crossing test over one period window and its neighbors
        n = len(self.vertices)
        starts = np.concatenate([self.vertices, [self.vertices[0] + self.period]])
        segs = [(starts[i], starts[i + 1]) for i in range(n)]
        for i in range(n):
            a0, a1 = segs[i]
            for j in range(i + 1, n):
                for shift in (-1, 0, 1):
                    b0, b1 = segs[j]
                    b0 += shift * self.period
                    b1 += shift * self.period
                    adjacent = shift == 0 and (j == i + 1 or (i == 0 and j == n - 1))
                    if adjacent:
                        continue
                    if j == n - 1 and i == 0 and shift == -1:
                        continue  # closing segment meets the first at the seam
                    if _segments_cross(a0, a1, b0, b1):
                        raise ValueError(
                            f"polyline self-intersects (segments {i} and {j})"
                        )

    def lift(self, t):
        """Planar point at parameter t (scalar or array), periodic extension."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        k = np.floor(ts)
        u = ts - k
        n = len(self.vertices)
        x = u * n
        idx = np.minimum(x.astype(int), n - 1)
        frac = x - idx
        nxt = np.roll(self.vertices, -1).copy()
        nxt[-1] = self.vertices[0] + self.period
        vals = self.vertices[idx] + frac * (nxt[idx] - self.vertices[idx]) + k * self.period
        if np.ndim(t) == 0:
            return complex(vals[0])
        return vals

    evaluate = lift

    def point(self, t: float) -> TorusPoint:
        return TorusPoint.from_complex(self.lift(float(t)))

    def speed_bound(self) -> float:
        n = len(self.vertices)
        closed = np.concatenate([self.vertices, [self.vertices[0] + self.period]])
        return float(np.max(np.abs(np.diff(closed))) * n)

    def translated(self, offset: complex) -> "PolylineCurve":
        return PolylineCurve(self.vertices + offset, self.period, injectivity_check=False)

    def rotated(self, quarter_turns: int) -> "PolylineCurve":
        rot = 1j ** (quarter_turns % 4)
        return PolylineCurve(
            self.vertices * rot, self.period * rot, injectivity_check=False
        )


def _segments_cross(a0, a1, b0, b1) -> bool:
    """Proper or improper crossing of two planar segments (complex endpoints)."""

    def orient(p, q, r):
        return (q.real - p.real) * (r.imag - p.imag) - (q.imag - p.imag) * (r.real - p.real)

    d1 = orient(b0, b1, a0)
    d2 = orient(b0, b1, a1)
    d3 = orient(a0, a1, b0)
    d4 = orient(a0, a1, b1)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0:
        return True

    def on_segment(p, q, r):
        return (
            orient(p, q, r) == 0
            and min(p.real, q.real) <= r.real <= max(p.real, q.real)
            and min(p.imag, q.imag) <= r.imag <= max(p.imag, q.imag)
        )

    return (
        on_segment(a0, a1, b0)
        or on_segment(a0, a1, b1)
        or on_segment(b0, b1, a0)
        or on_segment(b0, b1, a1)
    )


@dataclass(frozen=True)
class CurveInvariants:
    """The three quantities the reduction tracks for a curve within a pair.

    ``lam`` bounds the transverse extent of the image, ``epsilon`` is a
    certified lower bound on the distance to the partner curve, and
    ``alpha`` is the height invariant of the loop.
    """

    lam: float
    epsilon: float
    alpha: float

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 <= self.alpha < 1:
            raise ValueError("alpha must lie in [0, 1)")


def hamiltonian_height(curve: FourierCurve, nodes: int = 2048) -> float:
    """Height invariant of a winding-(1, 0) loop: (integral of y dx) mod 1.

    Two embedded (1, 0) loops are area-preserving isotopic within the torus
    exactly when this number agrees, and the straight loop t -> t + i*alpha
    is the normal form.  The integrand is a trigonometric polynomial, so the
    uniform rule below is exact once it has more than twice the curve's
    order in nodes.
    """
    if curve.winding != (1, 0):
        raise ValueError(f"height invariant needs winding (1, 0), got {curve.winding}")
    n = max(nodes, 4 * (curve.order + 2))
    ts = np.arange(n) / n
    y = np.imag(curve.lift(ts))
    dx = np.real(curve.derivative(ts))
    return wrap_unit(float(np.mean(y * dx)))


# ---------------------------------------------------------------------------
# smoothing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MollifyResult:
    """A smoothed curve plus a certified sup-norm distance to the input."""

    curve: FourierCurve
    c0_error: float


def _kernel_ft(k: np.ndarray, width: float) -> np.ndarray:
    """Fourier transform of the width-scaled kernel, normalized to 1 at k=0.

    For the kernel (35/32)(1 - (x/w)^2)^3 / w the transform at frequency k
    is 96 j_3(xi)/xi^3 / (32/35) with xi = 2 pi k w (j_3 the spherical
    Bessel function), which is numerically stable for all xi.
    """
    xi = TWO_PI * np.asarray(k, dtype=float) * width
    out = np.ones_like(xi)
    nz = np.abs(xi) > 1e-8
    out[nz] = 96.0 * spherical_jn(3, xi[nz]) / xi[nz] ** 3 * _KERNEL_NORM
    return out


def _polyline_periodic_part(curve: PolylineCurve):
    """Node parameters, periodic-part values, slopes, and slope jumps."""
    n = len(curve.vertices)
    ti = np.arange(n) / n
    qi = curve.vertices - curve.period * ti
    slopes = (np.roll(qi, -1) - qi) * n  # q is periodic: q_n = q_0
    jumps = slopes - np.roll(slopes, 1)
    return ti, qi, slopes, jumps


def mollify(curve: PolylineCurve, width: float, order: int) -> MollifyResult:
    """Kernel-smooth a periodic polyline and fit a trigonometric polynomial.

    The polyline is convolved (in parameter) with a compactly supported bump
    kernel of half-width ``width`` and projected onto Fourier order
    ``order``.  Both steps are done on exact closed-form coefficients, so the
    reported ``c0_error`` is a certified bound on the sup-norm distance
    between input and output maps: a kink term (the convolution only moves
    points within ``width`` of a vertex) plus the exact truncation tail.

    Raises :class:`EmbeddingLost` when the smoothed curve cannot be
    certified embedded; callers retry with a smaller width.
    """
    if width <= 0 or width > 0.25:
        raise ValueError("width must lie in (0, 0.25]")
    if order < 1:
        raise ValueError("order must be >= 1")
    per = curve.period
    if per not in (1 + 0j, -1 + 0j, 1j, -1j):
        raise ValueError("mollify expects a unit axis-aligned period vector")

    ti, qi, _slopes, jumps = _polyline_periodic_part(curve)

    k_ext = max(8 * order, order + 1024)
    k_all = np.arange(1, k_ext + 1, dtype=float)
    phase = np.exp(-2j * np.pi * np.outer(k_all, ti))
    qhat_pos = -(phase @ jumps) / (4 * math.pi**2 * k_all**2)
    qhat_neg = -(np.conj(phase) @ jumps) / (4 * math.pi**2 * k_all**2)
    kft = _kernel_ft(k_all, width)
    c_pos = qhat_pos * kft
    c_neg = qhat_neg * kft

    mean = complex(np.sum((qi + np.roll(qi, -1)) / 2) / len(qi))
    cos_coeffs = np.zeros(order + 1, dtype=complex)
    sin_coeffs = np.zeros(order + 1, dtype=complex)
    cos_coeffs[0] = mean
    cos_coeffs[1:] = c_pos[:order] + c_neg[:order]
    sin_coeffs[1:] = 1j * (c_pos[:order] - c_neg[:order])

    # certified sup-norm error: kink displacement + truncation tail
    window = np.abs(wrap_half(ti[:, None] - ti[None, :])) <= width
    kink_bound = _KERNEL_ABS_MOMENT * width * float(np.max(window @ np.abs(jumps)))
    tail_measured = float(np.sum(np.abs(c_pos[order:]) + np.abs(c_neg[order:])))
    jump_mass = float(np.sum(np.abs(jumps)))
    # |c_k| <= jump_mass/(4 pi^2 k^2) * 105/(2 pi k w)^4 beyond the computed range
    tail_remainder = (
        2.0
        * jump_mass
        / (4 * math.pi**2)
        * 105.0
        / (TWO_PI * width) ** 4
        / (5.0 * k_ext**5)
    )
    c0_error = kink_bound + tail_measured + tail_remainder

    try:
        smooth = FourierCurve(curve.winding, cos_coeffs, sin_coeffs)
    except ValueError as exc:
        raise EmbeddingLost(f"smoothed curve is not immersed: {exc}") from exc
    check_embedded(smooth)
    return MollifyResult(smooth, c0_error)


# ---------------------------------------------------------------------------
# embedding certificate
# ---------------------------------------------------------------------------


def check_embedded(curve: FourierCurve, samples: int = 4096, *, torus: bool | None = None):
    """Certify that a loop has no self-intersections; raise EmbeddingLost if not.

    The certificate has two regimes.  Locally (parameter gap below
    m/B2, with m a certified lower bound on the speed and B2 a bound on the
    second derivative) the curve is injective because the chord length is
    at least m*gap - B2*gap^2/2 > 0.  Beyond that gap, dense sample pairs
    must stay further apart than the sampling slack L*h.  Failure of either
    regime means the curve cannot be certified at this resolution.

    ``torus=True`` checks injectivity of the reduced loop (all lattice
    offsets); ``torus=False`` checks the planar periodic curve.  The default
    picks the torus mode for winding (1, 0) loops.
    """
    if torus is None:
        torus = curve.winding == (1, 0)
    h = 1.0 / samples
    speed_cap = curve.speed_bound()
    b2 = curve.second_derivative_bound()
    ts = np.arange(samples) * h
    derivs = curve.derivative(ts)
    speeds = np.abs(derivs)
    m_cert = float(speeds.min()) - b2 * h
    if m_cert <= 0:
        raise EmbeddingLost(
            f"cannot certify immersion: speed floor {m_cert:.3e} at {samples} samples"
        )

    # monotone-graph fast path: if the coordinate along the period axis is
    # strictly monotone, the curve covers that circle once and is embedded
    per = _winding_complex(curve.winding)
    along = derivs.real * per.real + derivs.imag * per.imag
    if float(along.min()) - b2 * h > 0:
        return

    local_gap = 0.45 if b2 == 0 else min(0.45, m_cert / b2)
    pts = curve.lift(ts)

    # distances: wrap the curve's period axis (both axes on the torus);
    # per-coordinate wrapping is the exact minimum over translates
    dx = pts.real[:, None] - pts.real[None, :]
    dy = pts.imag[:, None] - pts.imag[None, :]
    per = _winding_complex(curve.winding)
    if torus or per.real != 0:
        dx = wrap_half(dx)
    if torus or per.imag != 0:
        dy = wrap_half(dy)
    dist_sq = dx * dx + dy * dy
    gap = np.abs(wrap_half(ts[:, None] - ts[None, :]))
    far = gap >= max(local_gap - h, 2 * h)
    slack = speed_cap * h
    bad = far & (dist_sq <= slack * slack)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise EmbeddingLost(
            f"self-intersection (or certificate failure) near parameters "
            f"{ts[i]:.6f} and {ts[j]:.6f}: distance {math.sqrt(dist_sq[i, j]):.3e} "
            f"<= slack {slack:.3e}"
        )


# ---------------------------------------------------------------------------
# distance between two curve images
# ---------------------------------------------------------------------------


def _segment_min_distances(a0, a1, b0, b1):
    """Vectorized min distance between segment pairs (complex endpoints)."""

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    def point_seg(p, s0, s1):
        d = s1 - s0
        denom = np.abs(d) ** 2
        tproj = np.clip(((p - s0) * np.conj(d)).real / np.where(denom == 0, 1, denom), 0, 1)
        return np.abs(p - (s0 + tproj * d))

    d1 = cross(b1 - b0, a0 - b0)
    d2 = cross(b1 - b0, a1 - b0)
    d3 = cross(a1 - a0, b0 - a0)
    d4 = cross(a1 - a0, b1 - a0)
    crossing = ((d1 > 0) != (d2 > 0)) & ((d3 > 0) != (d4 > 0))
    dist = np.minimum.reduce(
        [
            point_seg(a0, b0, b1),
            point_seg(a1, b0, b1),
            point_seg(b0, a0, a1),
            point_seg(b1, a0, a1),
        ]
    )
    return np.where(crossing, 0.0, dist)


def _curve_chords(curve, samples: int):
    """Sample chord endpoints and a bound on the chord-to-curve deviation."""
    if isinstance(curve, PolylineCurve):
        n = len(curve.vertices)
        starts = curve.vertices
        ends = np.roll(curve.vertices, -1).copy()
        ends[-1] = curve.vertices[0] + curve.period
        return starts, ends, 0.0
    ts = np.arange(samples) / samples
    pts = curve.lift(ts)
    starts = pts
    ends = np.roll(pts, -1).copy()
    ends[-1] = pts[0] + _winding_complex(curve.winding)
    b2 = curve.second_derivative_bound()
    dev = b2 / (8.0 * samples**2)
    return starts, ends, dev


def min_distance(f, g, samples: int = 1024, *, mode: str = "torus") -> float:
    """Certified lower bound on the distance between two curve images.

    Both curves are replaced by dense chord polylines; the exact minimum
    over all chord pairs (and the relevant lattice or period translates) is
    computed, and each curve's chord-to-curve deviation bound is subtracted.
    For polylines and straight loops the result is exact.  ``mode`` is
    ``"torus"`` (distance between the reduced images, all offsets in
    Z[i]) or ``"planar"`` (distance between the periodic planar images,
    which must share a unit axis-aligned period).  Returns 0.0 when no
    positive bound can be certified.
    """
    if mode not in ("torus", "planar"):
        raise ValueError(f"unknown mode {mode!r}")
    wrap_x = wrap_y = True
    if mode == "planar":
        pf = _winding_complex(f.winding)
        pg = _winding_complex(g.winding)
        if pf not in (1 + 0j, -1 + 0j, 1j, -1j) or pg not in (pf, -pf):
            raise ValueError(
                "planar mode expects a common unit axis-aligned period direction"
            )
        wrap_x = pf.real != 0
        wrap_y = not wrap_x
    fa0, fa1, fdev = _curve_chords(f, samples)
    ga0, ga1, gdev = _curve_chords(g, samples)
    len_f = float(np.max(np.abs(fa1 - fa0)))
    len_g = float(np.max(np.abs(ga1 - ga0)))

    diff = fa0[:, None] - ga0[None, :]
    wx = wrap_half(diff.real) if wrap_x else diff.real
    wy = wrap_half(diff.imag) if wrap_y else diff.imag
    d0 = np.hypot(wx, wy)
    dmin_pts = float(d0.min())
    thresh = dmin_pts + len_f + len_g

    if thresh + len_f + len_g < 0.45:
        # one lattice shift per candidate pair suffices: any other shift
        # changes a wrapped coordinate by >= 1 and cannot reach thresh
        ii, jj = np.nonzero(d0 <= thresh)
        shift = (diff.real[ii, jj] - wx[ii, jj]) + 1j * (
            diff.imag[ii, jj] - wy[ii, jj]
        )
        d = _segment_min_distances(
            fa0[ii], fa1[ii], ga0[jj] + shift, ga1[jj] + shift
        )
        best = float(d.min())
    else:
        if wrap_x and wrap_y:
            grid = np.arange(-1, 2, dtype=float)
            offsets = (grid[:, None] + 1j * grid[None, :]).ravel()
        else:
            axis = 1.0 if wrap_x else 1j
            offsets = np.arange(-2, 3, dtype=float) * axis
        best = math.inf
        chunk = max(1, int(2e6) // max(1, len(ga0) * len(offsets)))
        for lo in range(0, len(fa0), chunk):
            a0 = fa0[lo : lo + chunk, None, None]
            a1 = fa1[lo : lo + chunk, None, None]
            b0 = ga0[None, :, None] + offsets[None, None, :]
            b1 = ga1[None, :, None] + offsets[None, None, :]
            d = _segment_min_distances(a0, a1, b0, b1)
            best = min(best, float(d.min()))
    return max(0.0, best - fdev - gdev)


# ---------------------------------------------------------------------------
# strips and rescaling
# ---------------------------------------------------------------------------


def strip_halfwidth(curve: PolylineCurve) -> float:
    """Max absolute transverse coordinate of an axis-aligned periodic polyline."""
    per = curve.period
    if per.real == 0 and per.imag != 0:
        return float(np.max(np.abs(curve.vertices.real)))
    if per.imag == 0 and per.real != 0:
        return float(np.max(np.abs(curve.vertices.imag)))
    raise ValueError("strip halfwidth needs an axis-aligned period vector")


class RescaledLoop:
    """The unit-torus loop t -> rot * base(n t) / n of a periodic planar curve.

    ``base`` must be periodic with a unit axis-aligned period; a vertical
    period is rotated to the internal horizontal convention first.  The
    result winds once horizontally per unit parameter and its transverse
    extent shrinks by 1/n.
    """

    winding: tuple[int, int] = (1, 0)

    def __init__(self, base, n: int):
        if n < 1:
            raise ValueError("rescale factor must be >= 1")
        per = _winding_complex(base.winding)
        if per == 1j:
            base = base.rotated(-1)
        elif per == -1j:
            base = base.rotated(1)
        elif per != 1 + 0j:
            raise ValueError(
                "rescaling expects period (0, 1) (or already-rotated period (1, 0))"
            )
        self.base = base
        self.n = int(n)

    def lift(self, t):
        return self.base.lift(np.asarray(t, dtype=float) * self.n) / self.n

    def derivative(self, t):
        return self.base.derivative(np.asarray(t, dtype=float) * self.n)

    def point(self, t: float) -> TorusPoint:
        return TorusPoint.from_complex(complex(self.lift(float(t))))

    def speed_bound(self) -> float:
        return self.base.speed_bound()

    def second_derivative_bound(self) -> float:
        return self.base.second_derivative_bound() * self.n


def rescale_to_torus(curve, n: int) -> RescaledLoop:
    """Shrink a periodic planar curve by 1/n onto the unit torus.

    Accepts the vertical-period orientation (rotating it by a quarter turn
    into the internal horizontal convention) or an already-horizontal curve.
    The output has winding class (1, 0).
    """
    return RescaledLoop(curve, n)


def transverse_extent(loop, samples: int = 4096) -> float:
    """Max distance of a (1, 0) loop from the horizontal circle y = 0 mod 1."""
    ts = np.arange(samples) / samples
    ys = np.imag(loop.lift(ts))
    return float(np.max(np.abs(wrap_half(ys))))


# ---------------------------------------------------------------------------
# curve file schema
# ---------------------------------------------------------------------------


def _parse_curve_spec(spec, where: str):
    if not isinstance(spec, dict):
        raise CurveFormatError(f"{where}: expected an object")
    kind = spec.get("kind")
    if kind == "polyline":
        period = spec.get("period")
        if (
            not isinstance(period, (list, tuple))
            or len(period) != 2
            or not all(isinstance(c, (int, float)) for c in period)
        ):
            raise CurveFormatError(f"{where}.period: expected [px, py] numbers")
        points = spec.get("points")
        if not isinstance(points, list) or not points:
            raise CurveFormatError(f"{where}.points: expected a nonempty list")
        for i, p in enumerate(points):
            if (
                not isinstance(p, (list, tuple))
                or len(p) != 2
                or not all(isinstance(c, (int, float)) for c in p)
            ):
                raise CurveFormatError(f"{where}.points[{i}]: expected [x, y] numbers")
        try:
            return PolylineCurve(
                [complex(p[0], p[1]) for p in points], complex(period[0], period[1])
            )
        except ValueError as exc:
            raise CurveFormatError(f"{where}: {exc}") from exc
    if kind == "fourier":
        cls = spec.get("class")
        if (
            not isinstance(cls, (list, tuple))
            or len(cls) != 2
            or not all(isinstance(c, int) for c in cls)
        ):
            raise CurveFormatError(f"{where}.class: expected [u, v] integers")

        def coeffs(name):
            raw = spec.get(name, [])
            if not isinstance(raw, list):
                raise CurveFormatError(f"{where}.{name}: expected a list of [re, im]")
            out = []
            for i, c in enumerate(raw):
                if (
                    not isinstance(c, (list, tuple))
                    or len(c) != 2
                    or not all(isinstance(x, (int, float)) for x in c)
                ):
                    raise CurveFormatError(
                        f"{where}.{name}[{i}]: expected [re, im] numbers"
                    )
                out.append(complex(c[0], c[1]))
            return out or [0j]

        try:
            return FourierCurve((cls[0], cls[1]), coeffs("cos"), coeffs("sin"))
        except ValueError as exc:
            raise CurveFormatError(f"{where}: {exc}") from exc
    raise CurveFormatError(f"{where}.kind: expected 'polyline' or 'fourier', got {kind!r}")


def load_curves(path):
    """Load a two-curve input file; raises CurveFormatError naming the bad field."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CurveFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "curves" not in doc:
        raise CurveFormatError("curves: missing top-level array")
    arr = doc["curves"]
    if not isinstance(arr, list) or len(arr) != 2:
        raise CurveFormatError("curves: expected exactly two curve specs")
    return (
        _parse_curve_spec(arr[0], "curves[0]"),
        _parse_curve_spec(arr[1], "curves[1]"),
    )


def curve_to_spec(curve) -> dict:
    """Serialize a curve into the input-file schema."""
    if isinstance(curve, PolylineCurve):
        return {
            "kind": "polyline",
            "period": [curve.period.real, curve.period.imag],
            "points": [[v.real, v.imag] for v in curve.vertices],
        }
    if isinstance(curve, FourierCurve):
        return {
            "kind": "fourier",
            "class": [curve.winding[0], curve.winding[1]],
            "cos": [[c.real, c.imag] for c in curve.cos_coeffs],
            "sin": [[c.real, c.imag] for c in curve.sin_coeffs],
        }
    raise TypeError(f"cannot serialize {type(curve).__name__}")


def curves_to_json(f, g) -> str:
    """Canonical JSON document for a curve pair."""
    doc = {"curves": [curve_to_spec(f), curve_to_spec(g)]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
