"""Tests for the fixed-point solver, revenue, and the Nash oracle."""

import itertools

import numpy as np
import pytest

from qprop import (
    AllZeroBids,
    DomainError,
    OlosInstance,
    best_response_profile,
    lower_bounds_sorted,
    olos_equilibrium,
    revenue,
    solve_fixed_point,
    verify_nash,
)


def symmetric_bid(n, p, v=1.0):
    """Closed-form symmetric equilibrium bid c = v p (n-1) / (n + p (n-1))."""
    return v * p * (n - 1) / (n + p * (n - 1))


class TestSolveFixedPoint:
    def test_two_equal_bidders(self):
        res = solve_fixed_point([1.0, 1.0], 1.0)
        np.testing.assert_allclose(res.bids, [1 / 3, 1 / 3], atol=1e-9)
        assert res.revenue == pytest.approx(1 / 3, abs=1e-9)
        assert res.residual <= 1e-9

    def test_symmetric_profiles_match_closed_form(self):
        for n, p in [(2, 1.0), (3, 0.5), (5, 2.0), (20, 5.0)]:
            res = solve_fixed_point(np.ones(n), p)
            np.testing.assert_allclose(
                res.bids, np.full(n, symmetric_bid(n, p)), atol=1e-8
            )
            report = verify_nash(res.bids, np.ones(n), p, grid_points=10_000)
            assert report.is_epsilon_nash

    def test_matches_exact_solver_on_two_bidders(self):
        eq = olos_equilibrium(OlosInstance(2, 2.0, 1.0))
        res = solve_fixed_point([2.0, 1.0], 1.0)
        np.testing.assert_allclose(res.bids, [eq.b1, eq.b2], atol=1e-6)

    def test_matches_exact_solver_across_instances(self):
        for n, alpha, p in itertools.product((2, 3, 5, 20), (1.1, 3.0, 10.0), (0.5, 2.0, 10.0)):
            inst = OlosInstance(n, alpha, p)
            eq = olos_equilibrium(inst)
            expected = np.full(n, eq.b2)
            expected[0] = eq.b1
            res = solve_fixed_point(inst.valuations(), p)
            np.testing.assert_allclose(res.bids, expected, atol=1e-6)

    def test_result_lies_in_certified_box(self):
        v = np.array([4.0, 2.0, 1.5, 1.0])
        p = 2.0
        res = solve_fixed_point(v, p)
        w = res.bounds_used.w
        assert np.all(res.bids >= w - 1e-12)
        assert np.all(res.bids <= v + 1e-12)

    def test_iterates_stay_in_box(self):
        # replay the damped iteration by hand and watch every iterate
        v = np.array([5.0, 2.0, 1.0])
        p = 3.0
        w = lower_bounds_sorted(v, p).w
        b = w.copy()
        for _ in range(200):
            br = best_response_profile(b, v, p)
            assert np.all(br >= w - 1e-12) and np.all(br <= v + 1e-12)
            b = 0.5 * b + 0.5 * br
            assert np.all(b >= w - 1e-12) and np.all(b <= v + 1e-12)

    def test_revenue_floor_from_bounds(self):
        # allocations sum to one, so revenue is a convex combination of the
        # bids and cannot fall below the smallest certified bid floor
        for v, p in [([3.0, 1.0], 1.0), ([10.0, 2.0, 1.0], 0.5), ([2.0, 2.0, 2.0], 4.0)]:
            res = solve_fixed_point(v, p)
            assert res.revenue >= res.bounds_used.w.min() - 1e-12

    def test_permutation_equivariance(self):
        v = np.array([4.0, 1.0, 2.5, 1.0])
        p = 1.5
        perm = np.array([2, 0, 3, 1])
        base = solve_fixed_point(v, p)
        shuffled = solve_fixed_point(v[perm], p)
        np.testing.assert_allclose(shuffled.bids, base.bids[perm], atol=1e-9)

    def test_bad_options_rejected(self):
        with pytest.raises(DomainError):
            solve_fixed_point([1.0, 1.0], 1.0, tol=0.0)
        with pytest.raises(DomainError):
            solve_fixed_point([1.0, 1.0], 1.0, damping=0.0)
        with pytest.raises(DomainError):
            solve_fixed_point([1.0, 1.0], 1.0, max_iter=0)


class TestRevenue:
    def test_equal_bids_pay_the_common_bid(self):
        assert revenue([0.4, 0.4, 0.4], 2.0) == pytest.approx(0.4, rel=1e-14)

    def test_two_bidder_equilibrium_value(self):
        eq = olos_equilibrium(OlosInstance(2, 2.0, 1.0))
        r = revenue([eq.b1, eq.b2], 1.0)
        assert r == pytest.approx(eq.revenue, rel=1e-12)

    def test_degenerate_single_positive_bid(self):
        assert revenue([1.0, 0.0], 1.0) == pytest.approx(1.0)

    def test_bounded_by_extreme_bids(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            b = rng.uniform(0.01, 5, size=rng.integers(2, 8))
            p = rng.uniform(0.1, 10)
            r = revenue(b, p)
            assert b.min() - 1e-12 <= r <= b.max() + 1e-12

    def test_all_zero_bids(self):
        with pytest.raises(AllZeroBids):
            revenue([0.0, 0.0], 1.0)


class TestVerifyNash:
    def test_accepts_symmetric_equilibrium(self):
        report = verify_nash([1 / 3, 1 / 3], [1.0, 1.0], 1.0)
        assert report.is_epsilon_nash
        assert report.worst_gain <= report.epsilon

    def test_accepts_olos_equilibrium(self):
        eq = olos_equilibrium(OlosInstance(2, 2.0, 1.0))
        report = verify_nash([eq.b1, eq.b2], [2.0, 1.0], 1.0)
        assert report.is_epsilon_nash

    def test_flags_perturbed_profile(self):
        eq = olos_equilibrium(OlosInstance(2, 2.0, 1.0))
        report = verify_nash([eq.b1 + 0.1, eq.b2], [2.0, 1.0], 1.0)
        assert not report.is_epsilon_nash
        assert report.worst_deviator == 0
        assert report.worst_gain > 1e-6

    def test_grid_floor_enforced(self):
        with pytest.raises(DomainError):
            verify_nash([0.3, 0.3], [1.0, 1.0], 1.0, grid_points=100)

    def test_oracle_agreement_across_solver_outputs(self):
        # every solver output must pass the deviation oracle, across bidder
        # counts, valuation spreads, and exponents
        def spread(n, kind):
            if kind == "equal":
                return np.ones(n)
            if kind == "one_large":
                v = np.ones(n)
                v[0] = 5.0
                return v
            return np.linspace(3.0, 1.0, n)  # mixed

        for n in (2, 3, 5, 20):
            for kind in ("equal", "one_large", "mixed"):
                for p in (0.5, 1.0, 2.0, 5.0):
                    v = spread(n, kind)
                    res = solve_fixed_point(v, p)
                    report = verify_nash(res.bids, v, p, grid_points=100_000)
                    assert report.is_epsilon_nash, (n, kind, p, report)
