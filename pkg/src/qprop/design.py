"""Revenue-maximizing exponent choice and parameter sweeps.

For a fixed instance the equilibrium revenue R(n, alpha, p) is observed to
rise and then fall in p, so the maximizing exponent is found by a coarse
log-spaced scan (which would expose a hypothetical second peak) followed by
golden-section refinement inside the peak cell.  The robust variant
maximizes the worst case of R over a finite uncertainty set of (alpha, n)
pairs with the same scan-then-refine scheme; each inner revenue is solved
exactly, never truncated.

Sweep rows are independent, deterministic, and may be computed in parallel;
QPROP_THREADS caps the worker count (default: machine parallelism).
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import check_exponent
from .errors import DomainError
from .olos import OlosInstance, olos_equilibrium, revenue_bounds

__all__ = [
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

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
SWEEP_HEADER = "axis,value,R,z,b1,b2,lower_bound,upper_bound,status"


@dataclass(frozen=True)
class DesignResult:
    p_star: float
    r_star: float
    search_trace: tuple  # ((p, R), ...) in evaluation order
    boundary: str | None = None  # "lower"/"upper" when the scan peaked at an edge


@dataclass(frozen=True)
class RobustDomain:
    """Finite uncertainty set of (alpha, n) pairs plus the outer p grid."""

    alphas: tuple
    ns: tuple
    p_min: float = 0.05
    p_max: float = 50.0
    points: int = 64

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        ns = tuple(int(n) for n in self.ns)
        if not alphas:
            raise DomainError("domain field 'alphas' must be non-empty")
        if not ns:
            raise DomainError("domain field 'ns' must be non-empty")
        for a in alphas:
            if not math.isfinite(a) or a <= 1.0:
                raise DomainError(f"domain field 'alphas' must exceed 1, got {a}")
        for n in ns:
            if n < 2:
                raise DomainError(f"domain field 'ns' must be at least 2, got {n}")
        p_min = float(self.p_min)
        p_max = float(self.p_max)
        if not (0.0 < p_min < p_max) or not math.isfinite(p_max):
            raise DomainError("domain field 'p_grid' needs 0 < min < max")
        if int(self.points) < 2:
            raise DomainError("domain field 'p_grid.points' must be at least 2")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "ns", ns)
        object.__setattr__(self, "p_min", p_min)
        object.__setattr__(self, "p_max", p_max)
        object.__setattr__(self, "points", int(self.points))

    @classmethod
    def from_dict(cls, data: dict) -> "RobustDomain":
        if not isinstance(data, dict):
            raise DomainError("domain file must hold a JSON object")
        for key in ("alphas", "ns"):
            if key not in data:
                raise DomainError(f"domain file is missing field '{key}'")
        grid = data.get("p_grid", {})
        if not isinstance(grid, dict):
            raise DomainError("domain field 'p_grid' must be an object")
        kwargs = {}
        if "min" in grid:
            kwargs["p_min"] = grid["min"]
        if "max" in grid:
            kwargs["p_max"] = grid["max"]
        if "points" in grid:
            kwargs["points"] = grid["points"]
        return cls(alphas=data["alphas"], ns=data["ns"], **kwargs)

    def pairs(self):
        return tuple((a, n) for a in self.alphas for n in self.ns)


@dataclass(frozen=True)
class RobustResult:
    p_tilde: float
    worst_case_R: float
    argmin_alpha: float
    argmin_n: int


@dataclass(frozen=True)
class SweepSpec:
    """One varied axis over a grid, the other two instance parameters fixed.

    axis is "p", "alpha", or "n"; the corresponding fixed field must be
    None and the other two set.  Grid values are linear or log spaced; an
    "n" axis is rounded to integers.  Bounds are validated here so rows
    cannot violate instance invariants after substitution.
    """

    axis: str
    minimum: float
    maximum: float
    points: int
    log: bool = False
    n: int | None = None
    alpha: float | None = None
    p: float | None = None

    def __post_init__(self):
        if self.axis not in ("p", "alpha", "n"):
            raise DomainError(f"sweep axis must be p, alpha, or n, got {self.axis!r}")
        if getattr(self, self.axis) is not None:
            raise DomainError(f"swept axis {self.axis!r} cannot also be fixed")
        fixed = {"p", "alpha", "n"} - {self.axis}
        for name in fixed:
            if getattr(self, name) is None:
                raise DomainError(f"sweep over {self.axis!r} must fix {name!r}")
        if self.n is not None and int(self.n) < 2:
            raise DomainError("fixed n must be at least 2")
        if self.alpha is not None and not float(self.alpha) > 1.0:
            raise DomainError("fixed alpha must exceed 1")
        if self.p is not None:
            check_exponent(self.p)
        lo, hi = float(self.minimum), float(self.maximum)
        if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
            raise DomainError("sweep grid needs min < max")
        if int(self.points) < 2:
            raise DomainError("sweep grid needs at least 2 points")
        limit = {"p": 0.0, "alpha": 1.0, "n": 2.0}[self.axis]
        if self.axis == "n":
            if lo < limit:
                raise DomainError("swept n must stay at or above 2")
        elif lo <= limit:
            raise DomainError(f"swept {self.axis} must stay above {limit}")
        if self.log and lo <= 0.0:
            raise DomainError("log spacing needs a positive lower bound")
        object.__setattr__(self, "minimum", lo)
        object.__setattr__(self, "maximum", hi)
        object.__setattr__(self, "points", int(self.points))

    def values(self) -> np.ndarray:
        if self.log:
            grid = np.geomspace(self.minimum, self.maximum, self.points)
        else:
            grid = np.linspace(self.minimum, self.maximum, self.points)
        if self.axis == "n":
            grid = np.rint(grid)
        return grid

    def instance(self, value) -> OlosInstance:
        params = {"n": self.n, "alpha": self.alpha, "p": self.p}
        params[self.axis] = value
        return OlosInstance(int(params["n"]), float(params["alpha"]), float(params["p"]))


@dataclass(frozen=True)
class SweepRow:
    axis: str
    value: float
    R: float = math.nan
    z: float = math.nan
    b1: float = math.nan
    b2: float = math.nan
    lower_bound: float = math.nan
    upper_bound: float = math.nan
    status: str = "ok"


@dataclass(frozen=True)
class StarRow:
    axis: str
    value: float
    p_star: float
    r_star: float
    boundary: str | None = None


def instance_revenue(n: int, alpha: float, p: float) -> float:
    """Equilibrium revenue R(n, alpha, p) of the exact solver."""
    return olos_equilibrium(OlosInstance(n, alpha, p)).revenue


def optimize_p(
    n: int,
    alpha: float,
    *,
    p_min: float = 0.05,
    p_max: float = 50.0,
    tol: float = 1e-6,
    coarse_points: int = 64,
) -> DesignResult:
    """Maximize R(n, alpha, p) over p by coarse scan plus golden refinement.

    tol is relative in p.  When the coarse scan is monotone into a grid
    boundary the result carries boundary="lower"/"upper" instead of failing,
    signalling that the search window should be widened.
    """
    if not (0.0 < p_min < p_max):
        raise DomainError("need 0 < p_min < p_max")
    if coarse_points < 3:
        raise DomainError("coarse scan needs at least 3 points")
    if tol <= 0.0:
        raise DomainError("tolerance must be positive")
    grid = np.geomspace(p_min, p_max, coarse_points)
    trace = [(float(p), instance_revenue(n, alpha, p)) for p in grid]
    values = [r for _, r in trace]
    k = int(np.argmax(values))
    boundary = None
    if k == 0:
        boundary = "lower"
    elif k == len(grid) - 1:
        boundary = "upper"
    if boundary is None:
        lo, hi = math.log(grid[k - 1]), math.log(grid[k + 1])
        refined = _golden_max(
            lambda lp: instance_revenue(n, alpha, math.exp(lp)), lo, hi, math.log1p(tol)
        )
        trace.extend((math.exp(lp), r) for lp, r in refined)
    best_p, best_r = max(trace, key=lambda pr: pr[1])
    return DesignResult(
        p_star=float(best_p),
        r_star=float(best_r),
        search_trace=tuple(trace),
        boundary=boundary,
    )


def robust_p(domain: RobustDomain, *, tol: float = 1e-6) -> RobustResult:
    """Maximin exponent over the uncertainty set.

    phi(p) = min over (alpha, n) in the domain of R(n, alpha, p) is
    evaluated exactly on the outer grid; the grid maximizer is refined by
    golden section between its neighbouring cells.  Reports which instance
    attains the inner minimum at the chosen exponent.
    """
    if tol <= 0.0:
        raise DomainError("tolerance must be positive")
    pairs = domain.pairs()

    def phi(p: float) -> float:
        return min(instance_revenue(n, a, p) for a, n in pairs)

    grid = np.geomspace(domain.p_min, domain.p_max, domain.points)
    values = [phi(float(p)) for p in grid]
    k = int(np.argmax(values))
    best_p, best_v = float(grid[k]), values[k]
    if 0 < k < len(grid) - 1:
        lo, hi = math.log(grid[k - 1]), math.log(grid[k + 1])
        for lp, r in _golden_max(lambda q: phi(math.exp(q)), lo, hi, math.log1p(tol)):
            if r > best_v:
                best_p, best_v = math.exp(lp), r
    worst_a, worst_n = min(
        pairs, key=lambda an: instance_revenue(an[1], an[0], best_p)
    )
    return RobustResult(
        p_tilde=float(best_p),
        worst_case_R=float(best_v),
        argmin_alpha=float(worst_a),
        argmin_n=int(worst_n),
    )


def sweep(spec: SweepSpec) -> list:
    """Solve one instance per grid point; errors are recorded in-row."""
    values = spec.values()

    def solve_row(value: float) -> SweepRow:
        try:
            inst = spec.instance(value)
            eq = olos_equilibrium(inst)
            rb = revenue_bounds(inst)
            return SweepRow(
                axis=spec.axis,
                value=float(value),
                R=eq.revenue,
                z=eq.z,
                b1=eq.b1,
                b2=eq.b2,
                lower_bound=rb.lower,
                upper_bound=rb.upper,
            )
        except Exception as exc:  # recorded, never dropped
            return SweepRow(axis=spec.axis, value=float(value), status=str(exc))

    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        return list(pool.map(solve_row, values))


def star_curves(axis: str, values, *, n: int | None = None, alpha: float | None = None, **opts) -> list:
    """optimize_p per grid point along alpha or n; errors recorded in-row."""
    if axis not in ("alpha", "n"):
        raise DomainError(f"star curve axis must be alpha or n, got {axis!r}")
    if axis == "alpha" and n is None:
        raise DomainError("star curve over alpha must fix n")
    if axis == "n" and alpha is None:
        raise DomainError("star curve over n must fix alpha")
    rows = []
    for value in values:
        kwargs = {"n": int(value), "alpha": alpha} if axis == "n" else {"n": n, "alpha": float(value)}
        result = optimize_p(kwargs["n"], kwargs["alpha"], **opts)
        rows.append(
            StarRow(
                axis=axis,
                value=float(value),
                p_star=result.p_star,
                r_star=result.r_star,
                boundary=result.boundary,
            )
        )
    return rows


def rows_to_csv(rows) -> str:
    """Render sweep rows with the stable header and round-trip floats."""
    lines = [SWEEP_HEADER]
    for row in rows:
        if row.status == "ok":
            cells = [
                row.axis,
                repr(row.value),
                repr(row.R),
                repr(row.z),
                repr(row.b1),
                repr(row.b2),
                repr(row.lower_bound),
                repr(row.upper_bound),
                "ok",
            ]
        else:
            status = row.status.replace('"', "'")
            if "," in status:
                status = f'"{status}"'
            cells = [row.axis, repr(row.value), "", "", "", "", "", "", status]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _golden_max(func, lo: float, hi: float, width: float):
    """Golden-section maximization; returns all (x, f(x)) evaluations."""
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1 = func(x1)
    f2 = func(x2)
    evals = [(x1, f1), (x2, f2)]
    while hi - lo > width:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = func(x2)
            evals.append((x2, f2))
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = func(x1)
            evals.append((x1, f1))
    mid = 0.5 * (lo + hi)
    evals.append((mid, func(mid)))
    return evals


def _worker_count() -> int:
    raw = os.environ.get("QPROP_THREADS", "").strip()
    if raw:
        try:
            cap = int(raw)
        except ValueError as exc:
            raise DomainError(f"QPROP_THREADS must be an integer, got {raw!r}") from exc
        if cap < 1:
            raise DomainError(f"QPROP_THREADS must be positive, got {cap}")
        return cap
    return os.cpu_count() or 1
