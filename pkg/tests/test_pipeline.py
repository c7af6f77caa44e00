"""End-to-end reduction: scale selection, lifting, refinement, convergence."""

import math

import numpy as np
import pytest

from squarepeg.curves import PolylineCurve
from squarepeg.fixtures import zigzag_pair
from squarepeg.pipeline import (
    LiftInconsistent,
    NotConverged,
    PipelineConfig,
    lift_square,
    render_svg,
    run,
    select_scale,
)
from squarepeg.square_finder import (
    SquareParams,
    SquareSolution,
    planar_square_error,
)


def vertical_lines(x_left=-0.2, x_right=0.2):
    f = PolylineCurve([complex(x_left, 0.0), complex(x_left, 0.5)], 1j)
    g = PolylineCurve([complex(x_right, 0.0), complex(x_right, 0.5)], 1j)
    return f, g


def distance_to_polyline(point: complex, poly: PolylineCurve, copies: int) -> float:
    """Exact distance from a planar point to several periods of a polyline."""
    best = math.inf
    verts = list(poly.vertices) + [poly.vertices[0] + poly.period]
    for k in range(-1, copies + 1):
        shift = k * poly.period
        for a, b in zip(verts[:-1], verts[1:]):
            a, b = a + shift, b + shift
            d = b - a
            t = ((point - a).real * d.real + (point - a).imag * d.imag) / abs(d) ** 2
            t = min(1.0, max(0.0, t))
            best = min(best, abs(point - (a + t * d)))
    return best


class TestSelectScale:
    def test_half(self):
        assert select_scale(0.5) == 9

    def test_zero(self):
        assert select_scale(0.0) == 1

    def test_one(self):
        assert select_scale(1.0) == 17

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            select_scale(-0.1)


@pytest.fixture(scope="module")
def vertical_report():
    f, g = vertical_lines()
    return run(f, g)


@pytest.fixture(scope="module")
def zigzag_curves():
    return zigzag_pair(3)


@pytest.fixture(scope="module")
def zigzag_report(zigzag_curves):
    f, g = zigzag_curves
    return run(f, g)


class TestVerticalLines:
    @pytest.fixture()
    def report(self, vertical_report):
        return vertical_report

    def test_converges_to_side_two_fifths(self, report):
        assert report.converged
        assert report.side == pytest.approx(0.4, abs=1e-9)

    def test_two_corners_on_each_line(self, report):
        xs = sorted(round(c.real, 6) for c in report.converged_square)
        assert xs == [-0.2, -0.2, 0.2, 0.2]

    def test_scale_matches_strip_halfwidth(self, report):
        assert report.lam == pytest.approx(0.2)
        assert report.n == select_scale(0.2) == 4
        assert report.n > 16 * report.lam

    def test_epsilon_is_line_separation(self, report):
        assert report.epsilon == pytest.approx(0.4, abs=1e-9)
        assert report.side >= report.epsilon - 1e-6

    def test_square_relations_hold(self, report):
        assert planar_square_error(report.converged_square) < 1e-10


class TestZigzag:
    @pytest.fixture()
    def fixture_pair(self, zigzag_curves):
        return zigzag_curves

    @pytest.fixture()
    def report(self, zigzag_report):
        return zigzag_report

    def test_converged_square(self, report):
        assert report.converged
        assert planar_square_error(report.converged_square) < 1e-8
        assert report.side >= report.epsilon - 1e-6
        assert report.n > 16 * report.lam

    def test_corners_lie_on_input_images(self, report, fixture_pair):
        f, g = fixture_pair
        for corner in report.converged_square:
            d = min(
                distance_to_polyline(corner, f, report.n),
                distance_to_polyline(corner, g, report.n),
            )
            assert d <= 1e-6 * report.n

    def test_movements_shrink_along_schedule(self, report):
        moves = [rec.movement for rec in report.levels if rec.movement is not None]
        assert moves
        assert moves[-1] < 1e-6
        assert moves == sorted(moves, reverse=True)

    def test_translation_invariance(self, report, fixture_pair):
        f, g = fixture_pair
        shifted = run(f.translated(2j), g.translated(2j))
        for a, b in zip(report.converged_square, shifted.converged_square):
            assert abs(a - b) < 1e-6

    def test_solutions_lift_within_quarter_radius(self, report):
        final = next(rec for rec in reversed(report.levels) if rec.solutions)
        for sol in final.solutions:
            corners = lift_square(sol, report.n, rotate_back=False)
            scaled = [c / report.n for c in corners]
            worst = max(
                abs(a - b) for i, a in enumerate(scaled) for b in scaled[i + 1 :]
            )
            assert worst <= 0.25 + 1e-12


class TestLiftSquare:
    def test_detects_far_corner(self):
        sol = SquareSolution(
            params=SquareParams(0, 0, 0, 0),
            corners=(0j, complex(0.3, 0.0), complex(0.3, 0.3), complex(0.0, 0.3)),
            side=0.3,
            residual_norm=0.0,
            degenerate_family=False,
            jacobian_min_singular_value=1.0,
        )
        with pytest.raises(LiftInconsistent):
            lift_square(sol, 4)

    def test_rescales_and_rotates_back(self):
        # wrapped square of side 0.04: P2 lifts below P1, P3/P4 complete it
        sol = SquareSolution(
            params=SquareParams(0, 0, 0, 0),
            corners=(
                complex(0.10, 0.02),
                complex(0.10, 0.98),
                complex(0.14, 0.98),
                complex(0.14, 0.02),
            ),
            side=0.04,
            residual_norm=0.0,
            degenerate_family=False,
            jacobian_min_singular_value=1.0,
        )
        corners = lift_square(sol, 5)
        assert planar_square_error(corners) < 1e-12
        assert abs(corners[1] - corners[0]) == pytest.approx(0.2)


class TestValidation:
    def test_rejects_non_polyline(self):
        from squarepeg.fixtures import horizontal_line

        f, g = vertical_lines()
        with pytest.raises(ValueError, match="polyline"):
            run(horizontal_line(0.0), g)

    def test_rejects_wrong_period(self):
        f, _ = vertical_lines()
        sideways = PolylineCurve([0j], 1 + 0j)
        with pytest.raises(ValueError, match="period"):
            run(f, sideways)

    def test_rejects_overlapping_inputs(self):
        f, _ = vertical_lines()
        with pytest.raises(ValueError, match="disjoint"):
            run(f, PolylineCurve([complex(-0.2, 0.1), complex(-0.2, 0.7)], 1j))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            PipelineConfig(widths=(), orders=())
        with pytest.raises(ValueError):
            PipelineConfig(widths=(0.01,), orders=(64, 128))


class TestNotConverged:
    def test_single_level_schedule_raises_with_report(self):
        f, g = vertical_lines()
        cfg = PipelineConfig(widths=(0.02,), orders=(128,))
        with pytest.raises(NotConverged) as err:
            run(f, g, cfg)
        report = err.value.report
        assert not report.converged
        assert report.levels and report.levels[0].solutions
        assert report.side == pytest.approx(0.4, abs=1e-9)


class TestSvg:
    def test_structure_and_window(self):
        f, g = vertical_lines()
        report = run(f, g)
        svg = render_svg(report, f, g)
        assert svg.count("<path") == 2
        assert svg.count("<polygon") == 1
        assert 'viewBox="-1.2 0 2.4 4"' in svg
