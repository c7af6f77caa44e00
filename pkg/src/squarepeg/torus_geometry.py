"""Arithmetic on the square torus C/Z[i] and on its product.

Points are stored as coordinates in [0, 1)^2.  Planar (lifted) points are
plain complex numbers throughout; the torus structure enters only through
the wrap helpers below.  Everything here is a pure function on immutable
values and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "TorusPoint",
    "TorusPair",
    "TangentPair",
    "wrap_unit",
    "wrap_half",
    "wrap_half_complex",
    "circle_distance",
    "reduce_point",
    "lift_near",
    "torus_distance",
    "square_completion",
    "square_completion_inverse",
    "covering_map",
    "deck_transformations",
    "DECK_OFFSETS",
    "difference_form",
    "square_completion_tangent",
    "covering_tangent",
]


def wrap_unit(x):
    """Reduce reals mod 1 into [0, 1), scalar or ndarray."""
    r = np.asarray(x, dtype=float) % 1.0
    # x % 1.0 can round up to exactly 1.0 for tiny negative x
    r = np.where(r >= 1.0, 0.0, r)
    if np.ndim(x) == 0:
        return float(r)
    return r


def wrap_half(x):
    """Reduce reals mod 1 into the minimal representative range (-1/2, 1/2]."""
    r = np.asarray(x, dtype=float) % 1.0
    # r == 1.0 (tiny negative inputs) also lands in the subtraction branch
    r = np.where(r > 0.5, r - 1.0, r)
    if np.ndim(x) == 0:
        return float(r)
    return r


def wrap_half_complex(z):
    """Componentwise minimal representative of a complex lattice class."""
    out = wrap_half(np.real(z)) + 1j * wrap_half(np.imag(z))
    if np.ndim(z) == 0:
        return complex(out)
    return out


def circle_distance(a, b):
    """Distance on R/Z between two reals."""
    d = np.abs(wrap_half(np.asarray(a, float) - np.asarray(b, float)))
    if np.ndim(d) == 0:
        return float(d)
    return d


@dataclass(frozen=True)
class TorusPoint:
    """A point of C/Z[i], stored with both coordinates in [0, 1)."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite torus point ({self.x}, {self.y})")
        object.__setattr__(self, "x", wrap_unit(self.x))
        object.__setattr__(self, "y", wrap_unit(self.y))

    @classmethod
    def from_complex(cls, z: complex) -> "TorusPoint":
        return cls(z.real, z.imag)

    def as_complex(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class TorusPair:
    """A point of (C/Z[i])^2."""

    first: TorusPoint
    second: TorusPoint

    @classmethod
    def from_complex(cls, a: complex, b: complex) -> "TorusPair":
        return cls(TorusPoint.from_complex(a), TorusPoint.from_complex(b))

    def as_complex(self) -> tuple[complex, complex]:
        return self.first.as_complex(), self.second.as_complex()


@dataclass(frozen=True)
class TangentPair:
    """A tangent vector to the product torus, one complex slot per factor."""

    u1: complex
    u2: complex

    def __post_init__(self):
        for v in (self.u1, self.u2):
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"non-finite tangent {v}")


def reduce_point(p) -> TorusPoint:
    """Quotient a planar point (complex or (x, y) pair) by the Z[i] lattice."""
    if isinstance(p, complex):
        return TorusPoint(p.real, p.imag)
    x, y = p
    return TorusPoint(float(x), float(y))


def lift_near(p: TorusPoint, anchor: complex) -> complex:
    """Lattice translate of ``p`` closest to ``anchor``.

    The result is within sqrt(2)/2 of the anchor.  Ties (translates exactly
    equidistant in a coordinate) are broken toward the lexicographically
    smallest planar translate, which makes the choice deterministic.
    """
    tx = p.x + math.ceil(anchor.real - p.x - 0.5)
    ty = p.y + math.ceil(anchor.imag - p.y - 0.5)
    return complex(tx, ty)


def torus_distance(p: TorusPoint, q: TorusPoint) -> float:
    """Minimum over lattice translates of the Euclidean distance."""
    return math.hypot(
        wrap_half(p.x - q.x),
        wrap_half(p.y - q.y),
    )


def square_completion(z: TorusPair) -> TorusPair:
    """Map (a, b) to (a + i(b-a), b + i(b-a)).

    Given two adjacent corners a, b of a positively oriented square, the
    output is the opposite pair of corners.  The defining linear map sends
    Z[i]^2 into itself, so any choice of lifts gives the same torus point.
    """
    a, b = z.as_complex()
    d = 1j * (b - a)
    return TorusPair.from_complex(a + d, b + d)


def square_completion_inverse(z: TorusPair) -> TorusPair:
    """Inverse of :func:`square_completion`; subtracts i(b-a) from both slots."""
    a, b = z.as_complex()
    d = 1j * (b - a)
    return TorusPair.from_complex(a - d, b - d)


def covering_map(z: TorusPair) -> TorusPair:
    """The 4-to-1 self covering (x, y) -> (x + conj(y), conj(x) - y)."""
    x, y = z.as_complex()
    return TorusPair.from_complex(x + y.conjugate(), x.conjugate() - y)


#: Simultaneous translation offsets generating the deck group of the covering.
DECK_OFFSETS: tuple[complex, ...] = (0.0 + 0.0j, 0.5 + 0.0j, 0.0 + 0.5j, 0.5 + 0.5j)


def deck_transformations() -> list[Callable[[TorusPair], TorusPair]]:
    """The four deck transformations of :func:`covering_map`.

    Each translates both coordinates simultaneously by one of the half-lattice
    offsets; together they form a group isomorphic to Z/2 x Z/2.
    """

    def make(offset: complex) -> Callable[[TorusPair], TorusPair]:
        def deck(z: TorusPair) -> TorusPair:
            a, b = z.as_complex()
            return TorusPair.from_complex(a + offset, b + offset)

        return deck

    return [make(offset) for offset in DECK_OFFSETS]


def _planar_area(a: complex, b: complex) -> float:
    """Signed area spanned by two complex numbers (Im of conj(a)*b)."""
    return a.real * b.imag - a.imag * b.real


def difference_form(at: TorusPair | None, u: TangentPair, v: TangentPair) -> float:
    """The difference of the factor area forms, evaluated on two tangents.

    Returns det(u1, v1) - det(u2, v2).  The form is translation invariant,
    so the base point argument is accepted for interface stability but not
    used.
    """
    del at
    return _planar_area(u.u1, v.u1) - _planar_area(u.u2, v.u2)


def square_completion_tangent(u: TangentPair) -> TangentPair:
    """Differential of :func:`square_completion` (a constant linear map)."""
    d = 1j * (u.u2 - u.u1)
    return TangentPair(u.u1 + d, u.u2 + d)


def covering_tangent(u: TangentPair) -> TangentPair:
    """Differential of :func:`covering_map` (a constant real-linear map)."""
    return TangentPair(u.u1 + u.u2.conjugate(), u.u1.conjugate() - u.u2)
