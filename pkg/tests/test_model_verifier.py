"""Straight-circle model: construction, double covers, intersection counts."""

import math

import numpy as np
import pytest

from squarepeg.fixtures import perturbed_pair
from squarepeg.model_verifier import (
    LinearCircle,
    ModelData,
    build_model,
    completion_pullback_residual,
    covering_pullback_factor,
    covering_pullback_residual,
    double_cover_check,
    geometric_intersection_count,
    hf_dimension_linear,
    lemma_report,
    model_circles,
    product_intersection_bound,
)
from squarepeg.square_finder import solve_all


def primitive_classes(bound: int):
    for u in range(-bound, bound + 1):
        for v in range(-bound, bound + 1):
            if (u, v) != (0, 0) and math.gcd(abs(u), abs(v)) == 1:
                yield (u, v)


class TestBuildModel:
    def test_generic_heights(self):
        model = build_model(0.7, 0.3)
        assert model.mu == pytest.approx(0.2, abs=1e-15)
        assert model.delta == pytest.approx(0.5, abs=1e-15)

    def test_equal_heights(self):
        model = build_model(0.4, 0.4)
        assert model.mu == 0.0
        assert model.delta == pytest.approx(0.4)

    def test_wraparound_difference(self):
        model = build_model(0.1, 0.9)
        assert model.mu == pytest.approx(0.1, abs=1e-15)
        assert model.delta == pytest.approx(0.0, abs=1e-15)

    def test_branch_lies_in_lower_half(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            model = build_model(rng.uniform(), rng.uniform())
            assert 0.0 <= model.mu < 0.5

    def test_invariants_enforced(self):
        with pytest.raises(ValueError, match="mu"):
            ModelData(alpha=0.7, beta=0.3, mu=0.3, delta=0.4)
        with pytest.raises(ValueError, match="delta"):
            ModelData(alpha=0.7, beta=0.3, mu=0.2, delta=0.4)


class TestDoubleCover:
    def test_generic_model(self):
        assert double_cover_check(build_model(0.7, 0.3)) < 1e-12

    def test_zero_offsets(self):
        model = build_model(0.0, 0.0)
        assert model.mu == 0.0 and model.delta == 0.0
        assert double_cover_check(model) < 1e-12

    def test_hundred_random_heights(self):
        rng = np.random.default_rng(32)
        worst = 0.0
        for _ in range(100):
            model = build_model(rng.uniform(), rng.uniform())
            worst = max(worst, double_cover_check(model, grid=64))
        assert worst < 1e-12


class TestHfDimension:
    def test_self_circle(self):
        m = LinearCircle((1, 0), 0.2)
        assert hf_dimension_linear(m, m) == 2

    def test_transverse_pair(self):
        p = LinearCircle((1, 0), 0.5)
        q = LinearCircle((1, 2), 0.5)
        assert hf_dimension_linear(p, q) == 2

    def test_parallel_distinct_translates(self):
        a = LinearCircle((1, 0), 0.1)
        b = LinearCircle((1, 0), 0.3)
        assert hf_dimension_linear(a, b) == 0

    def test_same_circle_after_spacing_reduction(self):
        # offsets one lattice-spacing apart describe the same circle
        a = LinearCircle((1, 2), 0.2)
        b = LinearCircle((1, 2), 0.2 + 1.0 / math.sqrt(5.0))
        assert a.same_circle(b)
        assert hf_dimension_linear(a, b) == 2

    def test_rejects_non_primitive(self):
        with pytest.raises(ValueError, match="primitive"):
            LinearCircle((2, 0), 0.0)
        with pytest.raises(ValueError, match="primitive"):
            LinearCircle((0, 0), 0.0)


class TestGeometricCount:
    def test_slope_two(self):
        assert geometric_intersection_count(
            LinearCircle((1, 0), 0.3), LinearCircle((1, 2), 0.7)
        ) == 2

    def test_horizontal_meets_vertical(self):
        assert geometric_intersection_count(
            LinearCircle((1, 0), 0.2), LinearCircle((0, 1), 0.6)
        ) == 1

    def test_diagonals(self):
        assert geometric_intersection_count(
            LinearCircle((1, 1), 0.0), LinearCircle((1, -1), 0.25)
        ) == 2

    def test_rejects_parallel(self):
        with pytest.raises(ValueError, match="transverse"):
            geometric_intersection_count(
                LinearCircle((1, 0), 0.1), LinearCircle((1, 0), 0.2)
            )

    def test_matches_determinant_exhaustively(self):
        rng = np.random.default_rng(33)
        classes = list(primitive_classes(3))
        for c1 in classes:
            for c2 in classes:
                det = c1[0] * c2[1] - c1[1] * c2[0]
                if det == 0:
                    continue
                first = LinearCircle(c1, float(rng.uniform()))
                second = LinearCircle(c2, float(rng.uniform()))
                assert geometric_intersection_count(first, second) == abs(det)


class TestProductBound:
    def test_model_pairs(self):
        model = build_model(0.7, 0.3)
        _f0, _g0, m, p, q = model_circles(model)
        assert product_intersection_bound((m, p), (m, q)) == 4

    def test_self_pair(self):
        model = build_model(0.7, 0.3)
        _f0, _g0, m, p, _q = model_circles(model)
        assert product_intersection_bound((m, p), (m, p)) == 4

    def test_zero_factor_annihilates(self):
        a = LinearCircle((1, 0), 0.0)
        b = LinearCircle((1, 0), 0.5)
        c = LinearCircle((1, 0), 0.25)
        assert product_intersection_bound((a, b), (c, b)) == 0


class TestPullbackHarnesses:
    def test_completion_preserves_form(self):
        assert completion_pullback_residual(1000, seed=100) < 1e-12

    def test_covering_factor_is_two(self):
        assert covering_pullback_factor(1000, seed=100) == pytest.approx(2.0, abs=1e-12)
        assert covering_pullback_residual(2.0, 1000, seed=100) < 1e-12


class TestLemmaReport:
    def test_report_passes_and_carries_factors(self):
        report = lemma_report(0.7, 0.3)
        assert report["pass"] is True
        assert report["hf_factors"] == [2, 2]
        assert report["hf_product"] == 4
        assert report["geometric_crossings_pq"] == 2
        assert report["mu"] == pytest.approx(0.2, abs=1e-15)
        assert report["delta"] == pytest.approx(0.5, abs=1e-15)
        assert report["tau_symplectic_residual"] < 1e-12
        assert report["cover_scale_residual"] < 1e-12
        assert report["cover_scale_factor"] == pytest.approx(2.0, abs=1e-12)
        assert report["double_cover_residual"] < 1e-12
        assert report["cover_degree"] == 4

    def test_cross_module_count_bound(self):
        # the lifted bound of 4 gives at least 4/2 = 2 downstairs tuples
        model = build_model(0.0, 0.5)
        _f0, _g0, m, p, q = model_circles(model)
        bound = product_intersection_bound((m, p), (m, q))
        assert bound == 4
        for seed in (0, 5, 9):
            f, g = perturbed_pair(seed)
            nondeg = [s for s in solve_all(f, g) if not s.degenerate_family]
            assert len(nondeg) >= bound // 2
