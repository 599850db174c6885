"""Tests for exponent optimization, robust maximin, and sweeps."""

import numpy as np
import pytest

from qprop import (
    DomainError,
    OlosInstance,
    RobustDomain,
    SweepSpec,
    instance_revenue,
    optimize_p,
    revenue_bounds,
    robust_p,
    rows_to_csv,
    star_curves,
    sweep,
)
from qprop.design import SWEEP_HEADER


class TestOptimizeP:
    def test_beats_second_price_at_large_alpha(self):
        result = optimize_p(2, 10.0)
        assert result.r_star > 1.0
        assert result.boundary is None

    def test_more_bidders_raise_the_peak(self):
        small = optimize_p(2, 3.0)
        large = optimize_p(20, 3.0)
        assert large.r_star > 1.0
        assert large.r_star > small.r_star

    def test_peak_exponent_decreases_with_alpha(self):
        assert optimize_p(2, 3.0).p_star > optimize_p(2, 10.0).p_star

    def test_peak_dominates_search_trace(self):
        result = optimize_p(3, 5.0)
        assert all(result.r_star >= r for _, r in result.search_trace)

    def test_local_optimality(self):
        for n, alpha in [(2, 3.0), (2, 5.0), (5, 2.0), (20, 10.0)]:
            result = optimize_p(n, alpha, tol=1e-6)
            delta = 10e-6 * result.p_star
            for p in (result.p_star - delta, result.p_star + delta):
                assert result.r_star >= instance_revenue(n, alpha, p) - 1e-12, (n, alpha)

    def test_below_closed_form_upper_bound(self):
        result = optimize_p(5, 4.0)
        rb = revenue_bounds(OlosInstance(5, 4.0, result.p_star))
        assert result.r_star < rb.upper

    def test_boundary_flag_when_window_clips_the_peak(self):
        result = optimize_p(2, 10.0, p_min=0.05, p_max=0.5)
        assert result.boundary == "upper"
        result = optimize_p(2, 10.0, p_min=20.0, p_max=50.0)
        assert result.boundary == "lower"

    def test_convex_weight_for_small_alpha(self):
        for n in (2, 20):
            for alpha in (1.5, 2.0):
                assert optimize_p(n, alpha).p_star > 1.0


class TestRobustP:
    def test_singleton_matches_optimize(self):
        direct = optimize_p(2, 3.0)
        robust = robust_p(RobustDomain(alphas=(3.0,), ns=(2,)))
        assert robust.p_tilde == pytest.approx(direct.p_star, rel=1e-4)
        assert robust.worst_case_R == pytest.approx(direct.r_star, rel=1e-9)
        assert robust.argmin_alpha == 3.0 and robust.argmin_n == 2

    def test_maximin_bounded_by_individual_maxima(self):
        domain = RobustDomain(alphas=(2.0, 3.0), ns=(2, 5))
        result = robust_p(domain)
        for alpha in domain.alphas:
            for n in domain.ns:
                assert result.worst_case_R <= optimize_p(n, alpha).r_star + 1e-9

    def test_dominates_outer_grid(self):
        domain = RobustDomain(alphas=(2.0, 3.0), ns=(2, 5))
        result = robust_p(domain)
        grid = np.geomspace(domain.p_min, domain.p_max, domain.points)
        for p in grid:
            phi = min(
                instance_revenue(n, a, float(p))
                for a in domain.alphas
                for n in domain.ns
            )
            assert result.worst_case_R >= phi - 1e-12

    def test_interior_peak(self):
        domain = RobustDomain(alphas=(3.0, 10.0), ns=(2,))
        result = robust_p(domain)
        assert result.worst_case_R > 0.0
        assert domain.p_min < result.p_tilde < domain.p_max

    def test_argmin_instance_attains_the_minimum(self):
        domain = RobustDomain(alphas=(2.0, 5.0), ns=(2, 3))
        result = robust_p(domain)
        attained = instance_revenue(result.argmin_n, result.argmin_alpha, result.p_tilde)
        assert attained == pytest.approx(result.worst_case_R, rel=1e-12)

    def test_domain_validation_names_field(self):
        with pytest.raises(DomainError, match="alphas"):
            RobustDomain(alphas=(0.5,), ns=(2,))
        with pytest.raises(DomainError, match="ns"):
            RobustDomain(alphas=(2.0,), ns=(1,))
        with pytest.raises(DomainError, match="alphas"):
            RobustDomain.from_dict({"ns": [2]})


class TestSweep:
    def test_revenue_single_peaked_in_p(self):
        spec = SweepSpec(axis="p", minimum=0.1, maximum=20.0, points=64, log=True, n=2, alpha=3.0)
        rows = sweep(spec)
        assert len(rows) == 64
        assert all(r.status == "ok" for r in rows)
        r_values = np.round([r.R for r in rows], 9)
        k = int(np.argmax(r_values))
        assert 0 < k < 63
        assert np.all(np.diff(r_values[: k + 1]) > 0)
        assert np.all(np.diff(r_values[k:]) < 0)

    def test_revenue_increasing_in_alpha(self):
        spec = SweepSpec(axis="alpha", minimum=1.1, maximum=10.0, points=40, n=2, p=3.0)
        r_values = np.round([r.R for r in sweep(spec)], 9)
        assert np.all(np.diff(r_values) > 0)

    def test_revenue_hump_in_n(self):
        spec = SweepSpec(axis="n", minimum=2, maximum=200, points=50, alpha=1.5, p=3.0)
        rows = sweep(spec)
        r_values = np.round([r.R for r in rows], 9)
        k = int(np.argmax(r_values))
        assert 0 < k < len(rows) - 1
        assert np.all(np.diff(r_values[: k + 1]) > 0)
        assert np.all(np.diff(r_values[k:]) < 0)

    def test_rows_carry_bounds_and_ratio(self):
        spec = SweepSpec(axis="p", minimum=0.5, maximum=2.0, points=5, n=3, alpha=2.0)
        for row in sweep(spec):
            assert row.lower_bound < row.R < row.upper_bound
            inst = OlosInstance(3, 2.0, row.value)
            lo, hi = inst.bracket()
            assert lo < row.z < hi
            assert row.b1 == pytest.approx(row.z * row.b2, rel=1e-12)

    def test_deterministic_output(self):
        spec = SweepSpec(axis="p", minimum=0.1, maximum=20.0, points=32, log=True, n=2, alpha=3.0)
        assert rows_to_csv(sweep(spec)) == rows_to_csv(sweep(spec))

    def test_csv_header_and_roundtrip_floats(self):
        spec = SweepSpec(axis="p", minimum=0.5, maximum=2.0, points=3, n=2, alpha=2.0)
        rows = sweep(spec)
        text = rows_to_csv(rows)
        lines = text.strip().split("\n")
        assert lines[0] == SWEEP_HEADER
        assert lines[0] == "axis,value,R,z,b1,b2,lower_bound,upper_bound,status"
        cells = lines[1].split(",")
        assert cells[0] == "p"
        assert float(cells[2]) == rows[0].R  # repr round-trips exactly

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            SweepSpec(axis="p", minimum=0.0, maximum=2.0, points=4, n=2, alpha=2.0)
        with pytest.raises(DomainError):
            SweepSpec(axis="alpha", minimum=0.9, maximum=2.0, points=4, n=2, p=1.0)
        with pytest.raises(DomainError):
            SweepSpec(axis="n", minimum=1, maximum=20, points=4, alpha=2.0, p=1.0)
        with pytest.raises(DomainError):
            SweepSpec(axis="p", minimum=0.5, maximum=2.0, points=4, n=2, alpha=2.0, p=1.0)
        with pytest.raises(DomainError):
            SweepSpec(axis="p", minimum=0.5, maximum=2.0, points=4, alpha=2.0)


class TestStarCurves:
    def test_alpha_axis_monotonicity(self):
        rows = star_curves("alpha", [1.5, 2.0, 3.0, 5.0, 10.0], n=2)
        r_stars = np.round([r.r_star for r in rows], 9)
        p_stars = np.round([r.p_star for r in rows], 9)
        assert np.all(np.diff(r_stars) > 0)
        assert np.all(np.diff(p_stars) < 0)

    def test_n_axis_concavity(self):
        rows = star_curves("n", [2, 3, 5, 10, 20], alpha=3.0)
        r_stars = np.array([r.r_star for r in rows])
        n_values = np.array([r.value for r in rows])
        gains = np.diff(r_stars)
        assert np.all(gains > 0)
        # per-bidder slope shrinks as bidders are added
        slopes = gains / np.diff(n_values)
        assert np.all(np.diff(np.round(slopes, 9)) < 0)

    def test_unit_increments_shrink(self):
        rows = star_curves("n", range(2, 8), alpha=3.0)
        gains = np.diff([r.r_star for r in rows])
        assert np.all(gains > 0)
        assert np.all(np.diff(gains) < 0)

    def test_p_star_narrow_range_in_n(self):
        rows = star_curves("n", [2, 5, 10, 20, 50], alpha=3.0)
        p_stars = np.array([r.p_star for r in rows])
        assert p_stars.max() / p_stars.min() < 2.0

    def test_axis_validation(self):
        with pytest.raises(DomainError):
            star_curves("p", [1.0], n=2)
        with pytest.raises(DomainError):
            star_curves("alpha", [2.0])
