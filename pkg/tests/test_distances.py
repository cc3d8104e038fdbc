import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ose.distances import (
    DistanceSpec,
    equal_distance_interval,
    min_norm_point,
    p_of_t_check,
    p_of_t_root,
    reduce_dependent_rows,
    solve_at_distances,
    varying_distance_coefficients,
    varying_distance_range,
)
from ose.equidistant import ose
from ose.errors import (
    DegenerateDirection,
    DependentRows,
    InconsistentSystem,
    Infeasible,
    NullspaceEmpty,
    TargetOutOfRange,
    UnsupportedCase,
    ZeroVector,
)
from ose.linalg import cosine_distance
from strategies import random_scaled, units

R2 = math.sqrt(2)


def realized(x, vectors):
    return np.array([cosine_distance(x, v) for v in vectors])


def circle(samples):
    theta = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    return np.column_stack([np.cos(theta), np.sin(theta)])


def fibonacci_sphere(samples):
    i = np.arange(samples) + 0.5
    phi = np.arccos(1 - 2 * i / samples)
    theta = np.pi * (1 + 5 ** 0.5) * i
    return np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])


class TestDistanceSpec:
    def test_validation(self):
        with pytest.raises(TargetOutOfRange):
            DistanceSpec([(1, 0)], [2.5])
        with pytest.raises(TargetOutOfRange):
            DistanceSpec([(1, 0)], [-0.1])
        with pytest.raises(ZeroVector):
            DistanceSpec([(0, 0)], [0.5])
        with pytest.raises(ValueError):
            DistanceSpec([(1, 0), (0, 1)], [0.5])

    def test_out_of_range_is_infeasible(self):
        assert issubclass(TargetOutOfRange, Infeasible)


class TestSolveAtDistances:
    def test_single_vector_on_circle(self):
        x = solve_at_distances(DistanceSpec([(1, 0)], [0.5]))
        np.testing.assert_allclose(x, (0.5, math.sqrt(0.75)), atol=1e-12)
        # brute force over 10^6 unit vectors: exactly two clusters, at (0.5, +-sqrt(0.75))
        pts = circle(1_000_000)
        hits = pts[np.abs((1 - pts[:, 0]) - 0.5) < 1e-5]
        assert len(hits) > 0
        assert np.all(np.abs(hits[:, 0] - 0.5) < 1e-4)
        assert np.all(np.abs(np.abs(hits[:, 1]) - math.sqrt(0.75)) < 1e-4)
        assert np.any(np.linalg.norm(hits - x, axis=1) < 1e-4)

    def test_square_exact(self):
        x = solve_at_distances(DistanceSpec([(1, 0), (0, 1)], [0, 1]))
        np.testing.assert_allclose(x, (1, 0), atol=1e-15)
        np.testing.assert_allclose(realized(x, [(1, 0), (0, 1)]), (0, 1), atol=1e-15)

    def test_square_infeasible(self):
        with pytest.raises(Infeasible):
            solve_at_distances(DistanceSpec([(1, 0), (0, 1)], [0, 0]))

    def test_square_inside_ball_has_no_nullspace(self):
        # |V^{-1} w| < 1 with N = n: the unique solution of Vx = w is not a unit vector
        with pytest.raises(NullspaceEmpty):
            solve_at_distances(DistanceSpec([(1, 0), (0, 1)], [0.5, 0.5]))

    def test_equality_case_returns_min_norm_solution(self):
        rng = np.random.default_rng(4)
        v = random_scaled(rng, 3, 6)
        lo = equal_distance_interval(v).lower
        spec = DistanceSpec(v, [lo] * 3)
        q = min_norm_point(spec)
        assert abs(np.linalg.norm(q) - 1) <= 1e-9
        np.testing.assert_allclose(solve_at_distances(spec), q, atol=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 5), st.integers(0, 2**32 - 1))
    def test_round_trip(self, N, extra, seed):
        rng = np.random.default_rng(seed)
        n = N + extra
        v = random_scaled(rng, N, n)
        x0 = rng.standard_normal(n)
        alpha = realized(x0, v)
        x = solve_at_distances(DistanceSpec(v, alpha))
        assert abs(np.linalg.norm(x) - 1) <= 1e-9
        np.testing.assert_allclose(realized(x, v), alpha, atol=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 5), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_feasibility_boundary(self, N, extra, seed):
        v = random_scaled(np.random.default_rng(seed), N, N + extra)
        iv = equal_distance_interval(v)
        delta = 1e-3
        with pytest.raises(Infeasible):
            solve_at_distances(DistanceSpec(v, [iv.lower - delta] * N))
        if iv.lower + delta <= iv.upper:
            x = solve_at_distances(DistanceSpec(v, [iv.lower + delta] * N))
            np.testing.assert_allclose(realized(x, v), iv.lower + delta, atol=1e-9)

    @pytest.mark.parametrize("seed", range(12))
    def test_brute_force_verdicts_circle(self, seed):
        rng = np.random.default_rng(seed)
        N = 1 + seed % 2
        v = rng.standard_normal((N, 2))
        alpha = rng.uniform(0, 2, size=N)
        spec = DistanceSpec(v, alpha)
        pts = circle(6284)  # angular step ~1e-3
        err = np.max(np.abs((1 - pts @ units(v).T) - alpha), axis=1).min()
        try:
            solve_at_distances(spec)
            feasible = True
        except Infeasible:
            feasible = False
        if feasible:
            assert err <= 2e-3
        else:
            # infeasible verdicts with N = 2 are generic; a sampled near-solution would contradict them
            assert err > 1e-6

    def test_brute_force_verdicts_sphere(self):
        rng = np.random.default_rng(99)
        pts = fibonacci_sphere(2_000_000)
        checked = 0
        for _ in range(40):
            v = rng.standard_normal((2, 3))
            alpha = rng.uniform(0, 2, size=2)
            q = min_norm_point(DistanceSpec(v, alpha))
            margin = abs(np.linalg.norm(q) - 1)
            if margin < 0.05:
                continue
            checked += 1
            err = np.max(np.abs((1 - pts @ units(v).T) - alpha), axis=1).min()
            try:
                solve_at_distances(DistanceSpec(v, alpha))
                assert err <= 1e-2
            except Infeasible:
                assert err > 1e-2
        assert checked >= 10


class TestReduceDependentRows:
    def test_duplicate_direction(self):
        r = reduce_dependent_rows(DistanceSpec([(1, 0), (2, 0)], [0.5, 0.5]))
        np.testing.assert_allclose(r.vectors, [(1, 0)])
        np.testing.assert_allclose(r.targets, [0.5])

    def test_inconsistent(self):
        with pytest.raises(InconsistentSystem):
            reduce_dependent_rows(DistanceSpec([(1, 0), (2, 0)], [0.5, 0.7]))
        with pytest.raises(InconsistentSystem):
            solve_at_distances(DistanceSpec([(1, 0), (2, 0)], [0.5, 0.7]))

    def test_combination_row(self):
        a1, a2 = 0.3, 0.4
        # row 3 normalized is (u1 + u2)/sqrt(2), so its target is induced by the first two
        a3 = 1 - ((1 - a1) + (1 - a2)) / R2
        spec = DistanceSpec([(1, 0, 0), (0, 1, 0), (1, 1, 0)], [a1, a2, a3])
        r = reduce_dependent_rows(spec)
        assert len(r) == 2
        x = solve_at_distances(spec)
        np.testing.assert_allclose(realized(x, spec.vectors), [a1, a2, a3], atol=1e-9)
        with pytest.raises(InconsistentSystem):
            reduce_dependent_rows(DistanceSpec(spec.vectors, [a1, a2, a3 + 0.01]))

    def test_independent_spec_unchanged(self):
        spec = DistanceSpec([(1, 0, 0), (0, 1, 0)], [0.5, 0.5])
        assert reduce_dependent_rows(spec) is spec

    def test_more_rows_than_dim(self):
        rng = np.random.default_rng(0)
        x = units(rng.standard_normal((1, 3)))[0]
        v = rng.standard_normal((6, 3))
        alpha = realized(x, v)
        sol = solve_at_distances(DistanceSpec(v, alpha))
        np.testing.assert_allclose(sol, x, atol=1e-9)


class TestEqualDistanceInterval:
    def test_orthonormal(self):
        iv = equal_distance_interval([(1, 0, 0), (0, 1, 0)])
        assert iv.gram_norm == pytest.approx(R2, abs=1e-15)
        assert (iv.lower, iv.upper) == pytest.approx((1 - 1 / R2, 1 + 1 / R2), abs=1e-15)

    def test_single(self):
        iv = equal_distance_interval([(1, 0)])
        assert (iv.lower, iv.upper, iv.gram_norm) == pytest.approx((0, 2, 1), abs=1e-15)

    def test_triple_matches_ose(self):
        trip = [(1, 0, 0), (0, 1, 0), (1, 1, 1)]
        assert abs(equal_distance_interval(trip).lower - ose(trip).common_distance) <= 1e-9

    def test_dependent(self):
        with pytest.raises(DependentRows):
            equal_distance_interval([(1, 0, 0), (0, 1, 0), (1, 1, 0)])

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 5), st.integers(0, 2**32 - 1))
    def test_lower_is_ose_distance(self, N, extra, seed):
        v = random_scaled(np.random.default_rng(seed), N, N + extra)
        iv = equal_distance_interval(v)
        r = ose(v)
        assert 0 <= iv.lower <= iv.upper <= 2
        assert abs(iv.lower - r.common_distance) <= 1e-9
        x = solve_at_distances(DistanceSpec(v, [iv.lower] * N))
        assert cosine_distance(x, r.solution) <= 1e-9


class TestVaryingDistanceRange:
    V2 = [(1, 0, 0), (0, 1, 0)]

    def test_zero_slope(self):
        c = varying_distance_coefficients(self.V2, (-1, 1))
        assert c.b == pytest.approx(0.0, abs=1e-15)
        assert varying_distance_range(self.V2, (-1, 1)) == pytest.approx((0.0, 0.0), abs=1e-15)

    def test_hand_fixture(self):
        c = varying_distance_coefficients(self.V2, (0, 1))
        assert c.a == pytest.approx(1.0, abs=1e-15)
        assert c.b == pytest.approx(R2, abs=1e-15)
        lo, hi = varying_distance_range(self.V2, (0, 1))
        assert (lo, hi) == pytest.approx((0.0, R2), abs=1e-15)
        # endpoint sits on the boundary |q| = 1
        q = min_norm_point(DistanceSpec(self.V2, [c.alpha_low, c.alpha_low + hi]))
        assert np.linalg.norm(q) == pytest.approx(1.0, abs=1e-12)
        # the mirrored endpoint is not feasible
        with pytest.raises(Infeasible):
            solve_at_distances(DistanceSpec(self.V2, [c.alpha_low, c.alpha_low - 0.5]))

    def test_t_zero_feasible(self):
        v = random_scaled(np.random.default_rng(1), 3, 5)
        c = varying_distance_coefficients(v, (0.0, 0.5, 1.0))
        solve_at_distances(DistanceSpec(v, [c.alpha_low] * 3))

    def test_errors(self):
        with pytest.raises(UnsupportedCase):
            varying_distance_range([(1, 0)], (1.0,))
        with pytest.raises(ValueError):
            varying_distance_range(self.V2, (1, 0))
        with pytest.raises(DependentRows):
            varying_distance_range([(1, 0, 0), (2, 0, 0)], (0, 1))

    def test_degenerate_direction(self):
        # u -> V^t G^{-1} u is injective for independent rows, so only a near-zero u degenerates
        with pytest.raises(DegenerateDirection):
            varying_distance_range(self.V2, (0.0, 1e-12), rank_tol=1e-10)


class TestPOfT:
    def test_examples(self):
        assert p_of_t_check((0.5, 0, 0), (0, 1, 0), math.sqrt(0.75)) == pytest.approx(1.0, abs=1e-15)
        assert p_of_t_check((0, 0, 0), (1, 0, 0), 1.0) == pytest.approx(1.0, abs=1e-15)
        assert p_of_t_check((0.6, 0, 0), (0, 0.5, 0), 2.0) == pytest.approx(1.36, abs=1e-15)

    @settings(max_examples=50)
    @given(st.integers(0, 2**32 - 1))
    def test_root_and_expansion(self, seed):
        rng = np.random.default_rng(seed)
        q = rng.standard_normal(5)
        q *= rng.uniform(0, 1) / np.linalg.norm(q)
        x1 = rng.standard_normal(5)
        x1 -= (x1 @ q) / (q @ q) * q
        t = p_of_t_root(q, x1)
        assert t >= 0
        assert np.linalg.norm(q + t * x1) ** 2 == pytest.approx(1.0, abs=1e-12)
        assert p_of_t_check(q, x1, t) == pytest.approx(np.linalg.norm(q + t * x1) ** 2, abs=1e-12)
