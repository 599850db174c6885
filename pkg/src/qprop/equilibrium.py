"""Equilibrium computation for general valuation profiles.

The solver runs damped best-response iteration started at the sorted bid
lower bounds, which lie inside an invariant box of the best-response map,
so every iterate stays inside the box.  Convergence of the iteration is an
empirical matter; a failure raises with the offending parameters and the
best iterate attached rather than being retried silently.

Uniqueness is only established for the one-large-others-symmetric family;
for general profiles with p > 1 the solver reports the single equilibrium
the iteration finds and makes no uniqueness claim.

A brute-force deviation oracle (verify_nash) certifies candidate profiles
independently of how they were produced.  Bid floors w also floor the
revenue: allocations sum to one, so revenue = sum a_i b_i >= min_i w_i at
any profile inside the box (an implied consequence, stated here because it
is the natural reading of lower bid bounds as lower revenue bounds).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import allocate, check_bids, check_exponent, check_valuations
from .errors import ConvergenceFailure, DomainError
from .response import BidLowerBounds, lower_bounds_sorted

__all__ = [
    "EquilibriumResult",
    "NashReport",
    "solve_fixed_point",
    "revenue",
    "verify_nash",
]


@dataclass(frozen=True)
class EquilibriumResult:
    bids: np.ndarray
    revenue: float
    iterations: int
    residual: float  # sup-norm of BR(bids) - bids
    bounds_used: BidLowerBounds


@dataclass(frozen=True)
class NashReport:
    is_epsilon_nash: bool
    epsilon: float
    worst_deviator: int
    worst_gain: float


def solve_fixed_point(
    v,
    p,
    *,
    tol: float = 1e-9,
    max_iter: int = 10_000,
    damping: float = 0.5,
) -> EquilibriumResult:
    """Find b with ||BR(b) - b||_inf <= tol by damped best-response iteration.

    The update is b <- (1 - damping) b + damping BR(b); damping tames the
    oscillation undamped iteration can show for large p without moving the
    fixed point.
    """
    v = check_valuations(v)
    p = check_exponent(p)
    if tol <= 0.0:
        raise DomainError("tolerance must be positive")
    if max_iter < 1:
        raise DomainError("iteration budget must be at least 1")
    if not 0.0 < damping <= 1.0:
        raise DomainError(f"damping must lie in (0, 1], got {damping}")
    bounds = lower_bounds_sorted(v, p)
    bids, iterations, residual, converged = _kernels.fixed_point(
        v, p, bounds.w, tol, max_iter, damping
    )
    if not converged:
        raise ConvergenceFailure(
            f"best-response iteration missed tol={tol} after {iterations} "
            f"iterations (residual {residual}) for v={v.tolist()}, p={p}, "
            f"damping={damping}",
            best_bids=bids,
            residual=float(residual),
            iterations=int(iterations),
        )
    return EquilibriumResult(
        bids=bids,
        revenue=revenue(bids, p),
        iterations=int(iterations),
        residual=float(residual),
        bounds_used=bounds,
    )


def revenue(b, p) -> float:
    """Auctioneer revenue sum_i a_i(b) b_i; a bid-weighted mean of the bids."""
    b = check_bids(b)
    return float(allocate(b, p) @ b)


def verify_nash(
    b,
    v,
    p,
    grid_points: int = 100_000,
    epsilon: float = 1e-6,
) -> NashReport:
    """Certify b as an epsilon-Nash profile by exhaustive deviation scan.

    Every bidder's deviations are swept over a uniform grid on [0, v_i]
    plus the analytic best response; the profile passes when no bidder
    gains more than epsilon.  Grid resolution error near a smooth interior
    maximum is quadratic in the step, so the default 1e5 points resolve
    gains far below the default epsilon.
    """
    b = check_bids(b)
    v = check_valuations(v)
    p = check_exponent(p)
    if b.size != v.size:
        raise DomainError("bid and valuation profiles must have equal length")
    grid_points = int(grid_points)
    if grid_points < 1_000:
        raise DomainError("deviation grid needs at least 1000 points")
    if epsilon <= 0.0:
        raise DomainError("epsilon must be positive")
    if np.count_nonzero(b > 0.0) < 2:
        raise DomainError("deviation scan needs at least two positive bids")
    worst_gain, worst_i = _kernels.deviation_scan(b, v, p, grid_points)
    worst_gain = float(worst_gain)
    return NashReport(
        is_epsilon_nash=worst_gain <= epsilon,
        epsilon=float(epsilon),
        worst_deviator=int(worst_i),
        worst_gain=worst_gain,
    )
