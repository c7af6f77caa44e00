"""Reproducible curve-pair fixtures: straight lines, perturbed lines, zigzags.

Every generator is a pure function of its seed, so fixture files and the
test corpus are byte-stable across runs and platforms.
"""

from __future__ import annotations

import numpy as np

from .curves import FourierCurve, PolylineCurve, check_embedded, min_distance

__all__ = [
    "horizontal_line",
    "model_lines",
    "random_lines",
    "perturbed_pair",
    "zigzag_pair",
    "generate",
    "FAMILIES",
]


def horizontal_line(height: float) -> FourierCurve:
    """The straight torus loop t -> t + i*height."""
    return FourierCurve((1, 0), [complex(0.0, height)], [0j])


def model_lines(alpha: float, beta: float) -> tuple[FourierCurve, FourierCurve]:
    """Two parallel straight loops at the given heights."""
    return horizontal_line(alpha), horizontal_line(beta)


def random_lines(seed: int) -> tuple[FourierCurve, FourierCurve]:
    """Seeded pair of parallel straight loops with height gap in [0.2, 0.5]."""
    rng = np.random.default_rng(seed)
    alpha = float(rng.uniform(0.0, 1.0))
    beta = float((alpha + rng.uniform(0.2, 0.5)) % 1.0)
    return model_lines(alpha, beta)


def _random_trig_perturbation(rng, amplitude: float, modes: int):
    budget = rng.dirichlet(np.ones(2 * modes)) * amplitude
    phases = rng.uniform(0.0, 2 * np.pi, size=2 * modes)
    cos = np.zeros(modes + 1, dtype=complex)
    sin = np.zeros(modes + 1, dtype=complex)
    for k in range(1, modes + 1):
        cos[k] = budget[2 * (k - 1)] * np.exp(1j * phases[2 * (k - 1)])
        sin[k] = budget[2 * k - 1] * np.exp(1j * phases[2 * k - 1])
    return cos, sin


def perturbed_pair(
    seed: int,
    amplitude: float = 0.05,
    gap: float = 0.5,
    modes: int = 3,
) -> tuple[FourierCurve, FourierCurve]:
    """Seeded trigonometric perturbations of two straight loops.

    The total coefficient budget of each perturbation is at most
    ``amplitude``, split randomly across the first ``modes`` harmonics.
    Draws are retried (deterministically) until both loops pass the
    embedding certificate and are certifiably disjoint.
    """
    rng = np.random.default_rng(seed)
    base_f = 0.0
    base_g = gap
    for _attempt in range(64):
        cos_f, sin_f = _random_trig_perturbation(rng, amplitude, modes)
        cos_g, sin_g = _random_trig_perturbation(rng, amplitude, modes)
        cos_f[0] += 1j * base_f
        cos_g[0] += 1j * base_g
        try:
            f = FourierCurve((1, 0), cos_f, sin_f)
            g = FourierCurve((1, 0), cos_g, sin_g)
            check_embedded(f, samples=1024)
            check_embedded(g, samples=1024)
        except Exception:
            continue
        if min_distance(f, g, samples=256, mode="torus") > 0.0:
            return f, g
    raise RuntimeError(f"no admissible perturbed pair found for seed {seed}")


def zigzag_pair(
    seed: int,
    vertices: int = 8,
    amplitude: float = 0.05,
    base_x: float = 0.2,
) -> tuple[PolylineCurve, PolylineCurve]:
    """Seeded vertically periodic zigzag polylines around x = -base_x and +base_x.

    Each curve is a graph over the vertical coordinate, so it is injective
    by construction, and the two stay at least 2*(base_x - amplitude) apart.
    """
    rng = np.random.default_rng(seed)
    ys = np.arange(vertices) / vertices
    offsets_f = rng.uniform(-amplitude, amplitude, size=vertices)
    offsets_g = rng.uniform(-amplitude, amplitude, size=vertices)
    f = PolylineCurve([complex(-base_x + o, y) for o, y in zip(offsets_f, ys)], 1j)
    g = PolylineCurve([complex(base_x + o, y) for o, y in zip(offsets_g, ys)], 1j)
    return f, g


def generate(family: str, seed: int):
    """Dispatch a fixture family by name."""
    if family not in FAMILIES:
        raise ValueError(
            f"unknown family {family!r}; expected one of {sorted(FAMILIES)}"
        )
    return FAMILIES[family](seed)


FAMILIES = {
    "lines": random_lines,
    "perturbed": perturbed_pair,
    "zigzag": zigzag_pair,
}
