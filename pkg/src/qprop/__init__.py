"""Winners-pay quasi-proportional auctions with power weight functions.

Bidder i receives the share f(b_i)/sum_j f(b_j) of the item, f(x) = x^p,
and pays bid times share.  The package computes best responses and
pure-strategy Nash equilibria, exact equilibria and revenue for one large
bidder against symmetric small bidders, revenue sandwich bounds, and
revenue-maximizing (or robust maximin) choices of the exponent p.

Set QPROP_BACKEND=numpy to run the plain-Python kernels instead of the
numba-compiled ones; QPROP_THREADS caps sweep parallelism.
"""

from ._jit import BACKEND
from .core import (
    allocate,
    allocation_derivatives,
    utility,
    utility_derivatives,
    weight,
)
from .design import (
    DesignResult,
    RobustDomain,
    RobustResult,
    StarRow,
    SweepRow,
    SweepSpec,
    instance_revenue,
    optimize_p,
    robust_p,
    rows_to_csv,
    star_curves,
    sweep,
)
from .equilibrium import (
    EquilibriumResult,
    NashReport,
    revenue,
    solve_fixed_point,
    verify_nash,
)
from .errors import AllZeroBids, BracketFailure, ConvergenceFailure, DomainError
from .olos import (
    OlosEquilibrium,
    OlosInstance,
    RevenueBounds,
    eta,
    foc_residuals,
    h_eval,
    olos_equilibrium,
    revenue_bounds,
    revenue_via_allocation,
    solve_z,
)
from .response import (
    BidLowerBounds,
    BoxCheck,
    best_response,
    best_response_profile,
    check_box_condition,
    lower_bounds_sorted,
    lower_bounds_uniform,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "AllZeroBids",
    "BracketFailure",
    "ConvergenceFailure",
    "DomainError",
    "weight",
    "allocate",
    "utility",
    "allocation_derivatives",
    "utility_derivatives",
    "BidLowerBounds",
    "BoxCheck",
    "best_response",
    "best_response_profile",
    "lower_bounds_uniform",
    "lower_bounds_sorted",
    "check_box_condition",
    "EquilibriumResult",
    "NashReport",
    "solve_fixed_point",
    "revenue",
    "verify_nash",
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
    "DesignResult",
    "RobustDomain",
    "RobustResult",
    "SweepSpec",
    "SweepRow",
    "StarRow",
    "instance_revenue",
    "optimize_p",
    "robust_p",
    "sweep",
    "star_curves",
    "rows_to_csv",
]
