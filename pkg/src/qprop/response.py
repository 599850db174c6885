"""Best responses and the bid-lower-bound box machinery.

Each bidder's response curve has a unique interior maximizer for every
p > 0.  A bound vector w with

    w_i <= v_i / (1 + (1/p)(1 + f(w_i)/s_i)),   s_i = sum_{j != i} f(w_j)

certifies that the joint best-response map sends the box
[w_1, v_1] x ... x [w_n, v_n] into itself, which is what the equilibrium
solver leans on.  Two constructions of such bounds are provided (uniform
and sorted-by-valuation) plus a checker for custom candidates.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import check_bids, check_exponent, check_valuations
from .errors import ConvergenceFailure, DomainError

__all__ = [
    "BidLowerBounds",
    "BoxCheck",
    "best_response",
    "best_response_profile",
    "lower_bounds_uniform",
    "lower_bounds_sorted",
    "check_box_condition",
]


@dataclass(frozen=True)
class BidLowerBounds:
    """Per-bidder bid floors certifying a best-response invariant box."""

    w: np.ndarray
    source: str  # "uniform" | "sorted" | "custom"

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 1 or w.size < 2 or not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise DomainError("bid lower bounds must be positive reals, n >= 2")
        object.__setattr__(self, "w", w)


@dataclass(frozen=True)
class BoxCheck:
    ok: bool
    slack: np.ndarray  # RHS_i - w_i per bidder; negative entries violate


def best_response(s, v, p) -> float:
    """The unique maximizer of u(b) = (b^p/(b^p+s))(v-b) over (0, v)."""
    p = check_exponent(p)
    s = float(s)
    v = float(v)
    if not math.isfinite(s) or s <= 0.0:
        raise DomainError(f"rival weight sum must be positive, got {s}")
    if not math.isfinite(v) or v <= 0.0:
        raise DomainError(f"private value must be positive, got {v}")
    b = _kernels.best_response(math.log(s), v, p)
    if not math.isfinite(b) or not 0.0 < b < v:
        raise ConvergenceFailure(
            f"best response search failed for s={s}, v={v}, p={p}: got {b}"
        )
    return b


def best_response_profile(b, v, p) -> np.ndarray:
    """Componentwise best responses BR_i(b) to the others' bids."""
    b = check_bids(b)
    v = check_valuations(v)
    p = check_exponent(p)
    if b.size != v.size:
        raise DomainError("bid and valuation profiles must have equal length")
    if np.count_nonzero(b > 0.0) < 2:
        raise DomainError(
            "best responses need at least two positive bids so every rival sum is positive"
        )
    out = np.empty_like(b)
    _kernels.best_response_profile(b, v, p, out)
    return out


def lower_bounds_uniform(v, p) -> BidLowerBounds:
    """Equal bid floors w_i = v_min / (1 + (1/p)(1 + 1/(n-1)))."""
    v = check_valuations(v)
    p = check_exponent(p)
    n = v.size
    w = v.min() / (1.0 + (1.0 / p) * (1.0 + 1.0 / (n - 1)))
    return BidLowerBounds(np.full(n, w), "uniform")


def lower_bounds_sorted(v, p) -> BidLowerBounds:
    """Bid floors driven by the second-highest valuation.

    With valuations sorted descending, the top two bidders share
    w = v_2 / (1 + 2/p) and each later bidder gets
    min(v_i / (1 + (1/p)(1 + 1/(i-1))), w_{i-1}).  Ties keep their original
    order (stable sort) and the result is mapped back to input positions.
    """
    v = check_valuations(v)
    p = check_exponent(p)
    n = v.size
    order = np.argsort(-v, kind="stable")
    vs = v[order]
    ws = np.empty(n)
    ws[0] = ws[1] = vs[1] / (1.0 + 2.0 / p)
    for i in range(2, n):
        rank = i + 1  # 1-based position in the sorted order
        ws[i] = min(vs[i] / (1.0 + (1.0 / p) * (1.0 + 1.0 / (rank - 1))), ws[i - 1])
    w = np.empty(n)
    w[order] = ws
    return BidLowerBounds(w, "sorted")


def check_box_condition(w, v, p, tol: float = 1e-12) -> BoxCheck:
    """Check w_i <= v_i / (1 + (1/p)(1 + f(w_i)/s_i)) for every bidder.

    The comparison is non-strict with absolute tolerance tol.  Returns the
    verdict together with the per-bidder slack RHS_i - w_i.
    """
    if isinstance(w, BidLowerBounds):
        w = w.w
    w = np.asarray(w, dtype=np.float64)
    v = check_valuations(v)
    p = check_exponent(p)
    if w.shape != v.shape:
        raise DomainError("bounds and valuations must have equal length")
    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        raise DomainError("candidate bounds must be positive")
    n = w.size
    lw = p * np.log(w)
    slack = np.empty(n)
    for i in range(n):
        # f(w_i)/s_i in log space; a ratio overflowing to inf correctly
        # drives the right-hand side to zero
        diff = lw[i] - _kernels.rival_log_weight(w, p, i)
        ratio = math.inf if diff > 700.0 else math.exp(diff)
        rhs = v[i] / (1.0 + (1.0 / p) * (1.0 + ratio))
        slack[i] = rhs - w[i]
    return BoxCheck(bool(np.all(slack >= -tol)), slack)
