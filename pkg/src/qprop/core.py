"""Weight functions, allocations, utilities, and their derivatives.

The auction allocates bidder i the share a_i(b) = f(b_i) / sum_j f(b_j)
with weight function f(x) = x^p, p > 0, and winners pay their bid times
their share, giving utility u_i(b) = a_i(b) (v_i - b_i).

Exponents, valuations, and bids are validated at entry: p must be a
positive finite real, valuations positive with at least two bidders, bids
non-negative.  All operations are pure functions over immutable inputs.
"""

import math

import numpy as np

from . import _kernels
from .errors import AllZeroBids, DomainError

__all__ = [
    "check_exponent",
    "check_valuations",
    "check_bids",
    "weight",
    "allocate",
    "utility",
    "allocation_derivatives",
    "utility_derivatives",
]


def check_exponent(p) -> float:
    """Validate the weight exponent; rejects p <= 0 and non-finite values."""
    p = float(p)
    if not math.isfinite(p) or p <= 0.0:
        raise DomainError(f"weight exponent must be a positive real, got {p}")
    return p


def check_valuations(v) -> np.ndarray:
    """Validate a valuation profile: every v_i > 0 and n >= 2."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size < 2:
        raise DomainError("valuation profile needs at least two bidders")
    if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
        raise DomainError("valuations must be positive finite reals")
    return v


def check_bids(b) -> np.ndarray:
    """Validate a bid profile: every b_i >= 0."""
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 1 or b.size == 0:
        raise DomainError("bid profile must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(b)) or np.any(b < 0.0):
        raise DomainError("bids must be non-negative finite reals")
    return b


def weight(p, x) -> float:
    """f(x) = x^p for x >= 0; zero bids carry zero weight for every p > 0."""
    p = check_exponent(p)
    x = float(x)
    if x < 0.0:
        raise DomainError(f"weight argument must be non-negative, got {x}")
    return _kernels.guarded_pow(x, p)


def allocate(b, p) -> np.ndarray:
    """Allocation shares a_i = b_i^p / sum_j b_j^p.

    Computed as a softmax over p ln b_i, which keeps the shares finite for
    arbitrarily large p and makes the scale covariance a(c b) = a(b) hold
    to rounding.  Raises AllZeroBids when no bid is positive.
    """
    b = check_bids(b)
    p = check_exponent(p)
    pos = b > 0.0
    if not pos.any():
        raise AllZeroBids("allocation is undefined when every bid is zero")
    a = np.zeros_like(b)
    lw = p * np.log(b[pos])
    w = np.exp(lw - lw.max())
    a[pos] = w / w.sum()
    return a


def utility(b, v, p, i) -> float:
    """u_i(b) = a_i(b) (v_i - b_i).

    Well-defined (and negative) for b_i > v_i as well; deviation oracles
    rely on evaluating such bids.
    """
    b = check_bids(b)
    v = check_valuations(v)
    if b.size != v.size:
        raise DomainError("bid and valuation profiles must have equal length")
    i = int(i)
    if not 0 <= i < b.size:
        raise DomainError(f"bidder index {i} out of range for n={b.size}")
    a = allocate(b, p)
    return float(a[i] * (v[i] - b[i]))


def allocation_derivatives(b, s, p):
    """(a, a', a'') of the single-bidder share a = b^p / (b^p + s).

    b is the bidder's own bid, s the fixed sum of the rivals' weights.
    """
    b, s, p = _check_point(b, s, p)
    t = math.log(s) - p * math.log(b)
    a = 0.0 if t > 709.0 else 1.0 / (1.0 + math.exp(t))
    a1 = (p / b) * a * (1.0 - a)
    a2 = (p / (b * b)) * a * (1.0 - a) * ((p - 1.0) - 2.0 * p * a)
    return a, a1, a2


def utility_derivatives(b, s, v, p):
    """(u, u', u'') of the response curve u = (b^p/(b^p+s)) (v - b)."""
    b, s, p = _check_point(b, s, p)
    v = float(v)
    if not math.isfinite(v) or v <= 0.0:
        raise DomainError(f"private value must be a positive real, got {v}")
    return _kernels.utility_terms(b, math.log(s), v, p)


def _check_point(b, s, p):
    p = check_exponent(p)
    b = float(b)
    s = float(s)
    if not math.isfinite(b) or b <= 0.0:
        raise DomainError(f"bid must be positive for derivative evaluation, got {b}")
    if not math.isfinite(s) or s <= 0.0:
        raise DomainError(f"rival weight sum must be positive, got {s}")
    return b, s, p
