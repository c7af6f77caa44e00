"""The square-condition residual, its Jacobian, and the solver."""

import math

import numpy as np
import pytest

from squarepeg.curves import min_distance
from squarepeg.fixtures import model_lines, perturbed_pair
from squarepeg.square_finder import (
    BijectionViolated,
    SolverConfig,
    SquareParams,
    SquareSolution,
    _newton_batch,
    jacobian,
    residual,
    solve_all,
    to_intersection_point,
    verify_square_planar,
)
from squarepeg.torus_geometry import circle_distance, wrap_unit


def family_deviation(params: SquareParams, gap: float) -> float:
    """Distance of a parameter tuple from the straight-line solution family
    a1 = b1 = s, a2 = b2 = s - gap (the analytic elimination of the residual
    on two parallel straight loops)."""
    return max(
        circle_distance(params.a1, params.b1),
        circle_distance(params.a2, params.a1 - gap),
        circle_distance(params.b2, params.b1 - gap),
    )


class TestResidual:
    def test_family_is_exact_zero(self):
        f, g = model_lines(0.0, 0.25)
        s = 0.6
        p = SquareParams(s, s - 0.25, s, s - 0.25)
        assert np.max(np.abs(residual(f, g, p))) == 0.0

    def test_generic_params_nonzero(self):
        f, g = model_lines(0.0, 0.25)
        rng = np.random.default_rng(21)
        for _ in range(20):
            p = SquareParams(*rng.uniform(size=4))
            if family_deviation(p, 0.25) > 0.05:
                assert np.linalg.norm(residual(f, g, p)) > 1e-4

    def test_solver_roots_have_tiny_residual(self):
        f, g = perturbed_pair(7)
        for sol in solve_all(f, g):
            assert np.linalg.norm(residual(f, g, sol.params)) < 1e-10


class TestJacobian:
    def test_constant_on_straight_lines(self):
        f, g = model_lines(0.1, 0.35)
        rng = np.random.default_rng(22)
        base = jacobian(f, g, SquareParams(*rng.uniform(size=4)))
        for _ in range(5):
            other = jacobian(f, g, SquareParams(*rng.uniform(size=4)))
            assert np.max(np.abs(other - base)) < 1e-14

    def test_matches_finite_differences(self):
        f, g = perturbed_pair(7)
        rng = np.random.default_rng(23)
        h = 1e-5
        for _ in range(5):
            arr = rng.uniform(size=4)
            jac = jacobian(f, g, SquareParams(*arr))
            fd = np.zeros((4, 4))
            for col in range(4):
                plus, minus = arr.copy(), arr.copy()
                plus[col] += h
                minus[col] -= h
                fd[:, col] = (
                    residual(f, g, SquareParams(*plus))
                    - residual(f, g, SquareParams(*minus))
                ) / (2 * h)
            assert np.max(np.abs(jac - fd)) < 1e-6

    def test_rank_three_on_model_family(self):
        f, g = model_lines(0.0, 0.25)
        p = SquareParams(0.3, 0.05, 0.3, 0.05)
        sv = np.linalg.svd(jacobian(f, g, p), compute_uv=False)
        assert sv[2] > 0.5
        assert sv[3] < 1e-14


class TestSolveAllModelLines:
    @pytest.mark.parametrize("gap", [0.1, 0.25, 0.5])
    def test_degenerate_family_recovered(self, gap):
        alpha = 0.2
        f, g = model_lines(alpha, wrap_unit(alpha + gap))
        sols = solve_all(f, g)
        assert sols
        side = min(gap, 1 - gap)
        for sol in sols:
            assert sol.degenerate_family
            assert family_deviation(sol.params, gap) < 1e-8
            assert abs(sol.side - side) < 1e-10
            assert verify_square_planar(sol)

    def test_side_never_below_curve_distance(self):
        f, g = model_lines(0.15, 0.4)
        eps = min_distance(f, g)
        for sol in solve_all(f, g):
            assert sol.side >= eps - 1e-12


class TestSolveAllPerturbed:
    def test_seed_seven_reaches_four_transverse_roots(self):
        f, g = perturbed_pair(7)
        sols = solve_all(f, g)
        nondeg = [s for s in sols if not s.degenerate_family]
        assert len(nondeg) >= 4
        for sol in sols:
            assert sol.residual_norm < 1e-10
            assert verify_square_planar(sol)
            assert sol.side >= min_distance(f, g, samples=512) - 1e-9

    @pytest.mark.parametrize("seed", [0, 7, 11])
    def test_at_least_two_roots_guaranteed(self, seed):
        # the covering-degree argument halves the lifted bound of 4
        f, g = perturbed_pair(seed)
        nondeg = [s for s in solve_all(f, g) if not s.degenerate_family]
        assert len(nondeg) >= 2

    def test_solution_set_complete_under_dense_reseeding(self):
        f, g = perturbed_pair(11)
        cfg = SolverConfig()
        sols = solve_all(f, g, cfg)
        rng = np.random.default_rng(24)
        roots = _newton_batch(f, g, rng.uniform(size=(4000, 4)), cfg)
        found = np.array([s.params.as_array() for s in sols])
        for root in roots:
            gaps = np.sqrt(
                ((np.abs((found - root + 0.5) % 1.0 - 0.5)) ** 2).sum(axis=1)
            )
            assert gaps.min() < 1e-6

    def test_grid_doubling_leaves_solution_set_unchanged(self):
        f, g = perturbed_pair(7)
        coarse = solve_all(f, g, SolverConfig(grid_resolution=64))
        fine = solve_all(f, g, SolverConfig(grid_resolution=128))
        a = np.array([s.params.as_array() for s in coarse])
        b = np.array([s.params.as_array() for s in fine])
        assert len(a) == len(b)
        for row in a:
            gaps = np.sqrt(((np.abs((b - row + 0.5) % 1.0 - 0.5)) ** 2).sum(axis=1))
            assert gaps.min() < 1e-6

    def test_reparameterization_shifts_params(self):
        f, g = perturbed_pair(7)
        shift = 0.3
        sols = solve_all(f, g)
        shifted_sols = solve_all(f.reparameterized(shift), g.reparameterized(shift))
        base = np.array([s.params.as_array() for s in sols])
        moved = np.array([s.params.as_array() for s in shifted_sols])
        assert len(base) == len(moved)
        expect = (base - shift) % 1.0
        for row in expect:
            gaps = np.sqrt(((np.abs((moved - row + 0.5) % 1.0 - 0.5)) ** 2).sum(axis=1))
            assert gaps.min() < 1e-6

    def test_workers_do_not_change_output(self):
        f, g = perturbed_pair(3)
        serial = solve_all(f, g, SolverConfig(workers=1))
        threaded = solve_all(f, g, SolverConfig(workers=4))
        assert [s.params for s in serial] == [s.params for s in threaded]


class TestIntersectionPoint:
    def test_model_family_point_matches_closed_form(self):
        f, g = model_lines(0.0, 0.25)
        sol = next(
            s for s in solve_all(f, g) if circle_distance(s.params.a1, 0.0) < 0.02
        )
        point = to_intersection_point(f, g, sol)
        s = sol.params.a1
        first, second = point.as_complex()
        assert abs(first - complex(wrap_unit(s - 0.25), 0.0)) < 1e-8
        assert abs(second - complex(wrap_unit(s - 0.25), 0.25)) < 1e-8

    def test_rejects_corrupted_solution(self):
        f, g = model_lines(0.0, 0.25)
        sol = solve_all(f, g)[0]
        p = sol.params
        broken = SquareSolution(
            params=SquareParams(p.a1, p.a2 + 0.01, p.b1, p.b2),
            corners=sol.corners,
            side=sol.side,
            residual_norm=sol.residual_norm,
            degenerate_family=sol.degenerate_family,
            jacobian_min_singular_value=sol.jacobian_min_singular_value,
        )
        with pytest.raises(BijectionViolated):
            to_intersection_point(f, g, broken)


def _solution_with_corners(corners, side):
    return SquareSolution(
        params=SquareParams(0, 0, 0, 0),
        corners=corners,
        side=side,
        residual_norm=0.0,
        degenerate_family=False,
        jacobian_min_singular_value=1.0,
    )


class TestVerifySquarePlanar:
    def test_axis_aligned_square(self):
        corners = (0j, 0.25j, complex(-0.25, 0.25), complex(-0.25, 0.0))
        assert verify_square_planar(_solution_with_corners(corners, 0.25))

    def test_perturbed_corner_fails(self):
        corners = (0j, 0.25j, complex(-0.25 + 1e-3, 0.25), complex(-0.25, 0.0))
        assert not verify_square_planar(_solution_with_corners(corners, 0.25))

    def test_degenerate_side_fails(self):
        corners = (0j, 0j, 0j, 0j)
        assert not verify_square_planar(_solution_with_corners(corners, 0.0))


class TestSolverConfig:
    def test_rejects_nonpositive_fields(self):
        with pytest.raises(ValueError):
            SolverConfig(grid_resolution=0)
        with pytest.raises(ValueError):
            SolverConfig(newton_tol=-1e-10)
        with pytest.raises(ValueError):
            SolverConfig(prefilter_radius=0.0)

    def test_rejects_wrong_winding(self):
        f, g = model_lines(0.0, 0.25)
        from squarepeg.curves import FourierCurve

        vertical = FourierCurve((0, 1), [0j], [0j])
        with pytest.raises(ValueError, match="winding"):
            solve_all(vertical, g)
        with pytest.raises(ValueError, match="winding"):
            solve_all(f, vertical)
