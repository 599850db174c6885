"""Exact equilibrium for one large bidder against symmetric small bidders.

An instance has bidder 1 valuing the item at alpha > 1 and the remaining
n - 1 bidders at 1.  The unique equilibrium is symmetric among the small
bidders, so it is pinned down by the bid ratio z = b1/b2, which is the lone
root of the polynomial-like function

    h(z) = z^(2p+1) + c1 z^(p+1) - c2 z^p + c3 z - c4,

    c1 = (n-2) + (1+p)(n-1)          c2 = alpha (1+p)(n-1)
    c3 = (n-1)(n-2)(1+p)             c4 = alpha (n-1) [(1+p)(n-2) + 1]

inside the bracket (alpha^(1/(2p+1)), alpha), where h is negative at the
left end and positive at the right.  Bids, revenue, and the revenue
sandwich bounds all follow from z in closed form.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import allocate, check_exponent
from .errors import BracketFailure, DomainError

__all__ = [
    "OlosInstance",
    "OlosEquilibrium",
    "RevenueBounds",
    "h_eval",
    "solve_z",
    "olos_equilibrium",
    "revenue_bounds",
    "eta",
    "foc_residuals",
    "revenue_via_allocation",
]


@dataclass(frozen=True)
class OlosInstance:
    """(n, alpha, p): bidder count, large bidder's value, weight exponent."""

    n: int
    alpha: float
    p: float

    def __post_init__(self):
        n = int(self.n)
        alpha = float(self.alpha)
        p = check_exponent(self.p)
        if n < 2:
            raise DomainError(f"need at least two bidders, got n={n}")
        if not math.isfinite(alpha) or alpha <= 1.0:
            raise DomainError(f"large bidder's value must exceed 1, got alpha={alpha}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "p", p)

    def valuations(self) -> np.ndarray:
        """The profile (alpha, 1, ..., 1) this instance abbreviates."""
        v = np.ones(self.n)
        v[0] = self.alpha
        return v

    def coefficients(self):
        n, alpha, p = float(self.n), self.alpha, self.p
        c1 = (n - 2.0) + (1.0 + p) * (n - 1.0)
        c2 = alpha * (1.0 + p) * (n - 1.0)
        c3 = (n - 1.0) * (n - 2.0) * (1.0 + p)
        c4 = alpha * (n - 1.0) * ((1.0 + p) * (n - 2.0) + 1.0)
        return c1, c2, c3, c4

    def bracket(self):
        """(alpha^(1/(2p+1)), alpha), the interval that contains the root."""
        return self.alpha ** (1.0 / (2.0 * self.p + 1.0)), self.alpha


@dataclass(frozen=True)
class OlosEquilibrium:
    z: float        # bid ratio b1/b2
    b1: float
    b2: float
    w_aux: float    # z^(p+1) (z^p + n - 2) / (n - 1)
    revenue: float


@dataclass(frozen=True)
class RevenueBounds:
    lower: float
    upper: float


def h_eval(z, inst: OlosInstance) -> float:
    """The bid-ratio polynomial h at z > 0, evaluated term by term."""
    z = float(z)
    if not math.isfinite(z) or z <= 0.0:
        raise DomainError(f"h is evaluated on positive reals, got z={z}")
    c1, c2, c3, c4 = inst.coefficients()
    p = inst.p
    return (
        _kernels.guarded_pow(z, 2.0 * p + 1.0)
        + c1 * _kernels.guarded_pow(z, p + 1.0)
        - c2 * _kernels.guarded_pow(z, p)
        + c3 * z
        - c4
    )


def solve_z(inst: OlosInstance, tol: float = 1e-12) -> float:
    """The unique root of h inside (alpha^(1/(2p+1)), alpha).

    Bisection on the sign-preserving scaled form h(z)/z^(2p+1) runs the
    bracket down to adjacent floats, then a short Newton polish on h itself
    sharpens the root.  The residual |h(z)| is checked against tol times the
    magnitude of the largest term: for large p the raw polynomial terms
    dwarf c4, so rounding noise in their cancellation is the attainable
    floor.  Raises BracketFailure when the endpoint signs are not (-, +).
    """
    if tol <= 0.0:
        raise DomainError("tolerance must be positive")
    z, status = _kernels.olos_root(float(inst.n), inst.alpha, inst.p)
    if status != 0:
        lo, hi = inst.bracket()
        raise BracketFailure(
            f"h endpoint signs are not (-, +) on ({lo}, {hi}) for "
            f"n={inst.n}, alpha={inst.alpha}, p={inst.p}"
        )
    c1, c2, c3, c4 = inst.coefficients()
    p = inst.p
    top = _kernels.guarded_pow(z, 2.0 * p + 1.0)
    scale = max(1.0, abs(c4), top, c2 * _kernels.guarded_pow(z, p))
    if math.isfinite(top) and abs(h_eval(z, inst)) > tol * scale:
        raise BracketFailure(
            f"root residual above tolerance for n={inst.n}, "
            f"alpha={inst.alpha}, p={inst.p}: |h({z})| > {tol * scale}"
        )
    return z


def olos_equilibrium(inst: OlosInstance) -> OlosEquilibrium:
    """Solve the instance: bid ratio, both bids, and equilibrium revenue.

    b2 comes from the small bidders' first-order condition rearranged as
    b2 = p K / (1 + (1+p) K) with K = z^p + n - 2, a form with no
    subtractive cancellation that keeps b2 inside [p/(1+p+1/(n-1)),
    p/(1+p)) to the last float.  Revenue uses the closed form eta(z).
    """
    z = solve_z(inst)
    n, p = float(inst.n), inst.p
    zp = math.exp(p * math.log(z))
    k = zp + n - 2.0
    b2 = p * k / (1.0 + (1.0 + p) * k)
    b1 = z * b2
    w_aux = z * zp * k / (n - 1.0)
    return OlosEquilibrium(z, b1, b2, w_aux, _eta_expr(z, inst))


def revenue_bounds(inst: OlosInstance) -> RevenueBounds:
    """Strict sandwich for the equilibrium revenue.

    eta is strictly increasing over the root bracket and the equilibrium
    revenue is eta(z), so evaluating eta at the bracket endpoints bounds
    the revenue from both sides.
    """
    lo, hi = inst.bracket()
    return RevenueBounds(_eta_expr(lo, inst), _eta_expr(hi, inst))


def eta(x, inst: OlosInstance) -> float:
    """The revenue expression as a function of the bid ratio.

    Defined on (alpha^(1/(2p+1)), alpha]; at the equilibrium ratio it is
    the equilibrium revenue, at x = alpha it collapses to the upper revenue
    bound.  Outside the interval the denominator may vanish, so the domain
    is enforced.
    """
    x = float(x)
    lo, hi = inst.bracket()
    if not math.isfinite(x) or not lo < x <= hi:
        raise DomainError(f"eta is defined on ({lo}, {hi}], got x={x}")
    return _eta_expr(x, inst)


def _eta_expr(x, inst: OlosInstance) -> float:
    n, alpha, p = float(inst.n), inst.alpha, inst.p
    lx = math.log(x)
    # growth factor 1 + x^p (x-1) / (x^p + n - 1), rewritten with the
    # reciprocal power so x^p ~ 1e308 cannot poison it
    growth = 1.0 + (x - 1.0) / (1.0 + (n - 1.0) * math.exp(-p * lx))
    # the discount denominator may overflow to inf for extreme p, which
    # correctly sends the subtracted ratio to zero
    denom = (
        _kernels.guarded_pow(x, 2.0 * p + 1.0)
        + (n - 2.0) * _kernels.guarded_pow(x, p + 1.0)
        - x * (n - 1.0)
    )
    discount = 1.0 - (alpha - x) * (n - 1.0) / denom
    return (p / (1.0 + p)) * growth * discount


def revenue_via_allocation(eq: OlosEquilibrium, inst: OlosInstance) -> float:
    """Independent revenue route: sum a_i b_i on (b1, b2, ..., b2)."""
    bids = np.full(inst.n, eq.b2)
    bids[0] = eq.b1
    return float(allocate(bids, inst.p) @ bids)


def foc_residuals(eq: OlosEquilibrium, inst: OlosInstance):
    """Relative residuals of the two equilibrium first-order conditions.

    (n-1) b2^p [alpha p - (1+p) b1] = b1^(p+1)
    [b1^p + (n-2) b2^p] [p - (1+p) b2] = b2^(p+1)
    """
    n, alpha, p = float(inst.n), inst.alpha, inst.p
    b1, b2 = eq.b1, eq.b2
    b1p = _kernels.guarded_pow(b1, p)
    b2p = _kernels.guarded_pow(b2, p)
    lhs1 = (n - 1.0) * b2p * (alpha * p - (1.0 + p) * b1)
    rhs1 = b1p * b1
    lhs2 = (b1p + (n - 2.0) * b2p) * (p - (1.0 + p) * b2)
    rhs2 = b2p * b2
    r1 = abs(lhs1 - rhs1) / max(abs(lhs1), abs(rhs1), 1e-300)
    r2 = abs(lhs2 - rhs2) / max(abs(lhs2), abs(rhs2), 1e-300)
    return r1, r2
