"""Hot numeric kernels, written once and compiled with numba when available.

Every function here is nopython-compatible plain Python over float64 scalars
and 1-d arrays; :func:`qprop._jit.jit` turns them into cached ``njit``
dispatchers under the numba backend and leaves them untouched under the
numpy fallback.

Bid weights are handled in log space throughout: with f(b) = b^p and p as
large as 1e3, b^p overflows float64 for everyday bids, while the allocation
a = f/(f+s) = 1/(1 + exp(ln s - p ln b)) stays a well-behaved logistic.
"""

import math

import numpy as np

from ._jit import jit

NEG_INF = float("-inf")
# inverse golden ratio, contraction factor of the section search
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@jit
def guarded_pow(x, p):
    # x**p via exp(p ln x); x = 0 maps to 0 for every p > 0.  The explicit
    # overflow check keeps the plain-Python backend from raising where the
    # compiled one would return inf.
    if x <= 0.0:
        return 0.0
    t = p * math.log(x)
    if t > 709.0:
        return math.inf
    return math.exp(t)


@jit
def utility_terms(b, ls, v, p):
    """Utility of bidding b > 0 against fixed rivals, plus two derivatives.

    ls is ln of the rivals' weight sum.  Returns (u, u', u'') of
    u = a (v - b) with a = b^p / (b^p + s), using
    a'  = (p/b)   a (1-a)
    a'' = (p/b^2) a (1-a) ((p-1) - 2 p a)
    """
    t = ls - p * math.log(b)
    if t > 709.0:
        # allocation underflows to zero; so do all three terms
        return 0.0, 0.0, 0.0
    a = 1.0 / (1.0 + math.exp(t))
    a1 = (p / b) * a * (1.0 - a)
    a2 = (p / (b * b)) * a * (1.0 - a) * ((p - 1.0) - 2.0 * p * a)
    margin = v - b
    u = a * margin
    u1 = a1 * margin - a
    u2 = a2 * margin - 2.0 * a1
    return u, u1, u2


@jit
def utility_value(b, ls, v, p):
    if b <= 0.0:
        return 0.0
    t = ls - p * math.log(b)
    if t > 709.0:
        return 0.0
    return (v - b) / (1.0 + math.exp(t))


@jit
def best_response(ls, v, p):
    """Unique maximizer of u(b) on (0, v) for rivals' log weight sum ls.

    Golden-section search shrinks [0, v] to width 1e-12 v; the utility is
    zero at both endpoints and strictly unimodal in between, so the bracket
    always holds the maximizer.  One guarded Newton step on u' then polishes
    past the flat-comparison noise floor of the section search.
    """
    lo = 0.0
    hi = v
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1 = utility_value(x1, ls, v, p)
    f2 = utility_value(x2, ls, v, p)
    for _ in range(90):
        if hi - lo <= 1e-12 * v:
            break
        if f1 < f2:
            lo = x1
            x1 = x2
            f1 = f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = utility_value(x2, ls, v, p)
        else:
            hi = x2
            x2 = x1
            f2 = f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = utility_value(x1, ls, v, p)
    b = 0.5 * (lo + hi)
    u, u1, u2 = utility_terms(b, ls, v, p)
    if math.isfinite(u1) and math.isfinite(u2) and u2 < 0.0:
        bn = b - u1 / u2
        if 0.0 < bn < v:
            _, u1n, _ = utility_terms(bn, ls, v, p)
            if abs(u1n) <= abs(u1):
                b = bn
    return b


@jit
def rival_log_weight(b, p, i):
    """log sum_{j != i} b_j^p, computed as a logsumexp over p ln b_j."""
    n = b.shape[0]
    m = NEG_INF
    for j in range(n):
        if j != i and b[j] > 0.0:
            lw = p * math.log(b[j])
            if lw > m:
                m = lw
    if m == NEG_INF:
        return NEG_INF
    acc = 0.0
    for j in range(n):
        if j != i and b[j] > 0.0:
            acc += math.exp(p * math.log(b[j]) - m)
    return m + math.log(acc)


@jit
def best_response_profile(b, v, p, out):
    n = b.shape[0]
    for i in range(n):
        out[i] = best_response(rival_log_weight(b, p, i), v[i], p)


@jit
def fixed_point(v, p, b0, tol, max_iter, damping):
    """Damped best-response iteration b <- (1-d) b + d BR(b).

    Returns (bids, iterations, residual, converged) where bids is the first
    iterate whose sup-norm residual ||BR(b) - b|| falls to tol, or the last
    iterate otherwise.
    """
    n = v.shape[0]
    b = b0.copy()
    br = np.empty(n)
    resid = math.inf
    for it in range(max_iter + 1):
        best_response_profile(b, v, p, br)
        resid = 0.0
        for i in range(n):
            d = abs(br[i] - b[i])
            if d > resid:
                resid = d
        if resid <= tol:
            return b, it, resid, True
        for i in range(n):
            b[i] = (1.0 - damping) * b[i] + damping * br[i]
    return b, max_iter, resid, False


@jit
def deviation_scan(b, v, p, grid_points):
    """Worst unilateral deviation gain over a bid grid plus the analytic BR.

    For each bidder the candidate deviations are grid_points equispaced bids
    on [0, v_i] together with the best response to the others' bids; the gain
    is measured against the bidder's utility at the profile b.
    """
    n = b.shape[0]
    worst_gain = NEG_INF
    worst_i = 0
    for i in range(n):
        ls = rival_log_weight(b, p, i)
        base = utility_value(b[i], ls, v[i], p)
        best = 0.0  # deviation to zero bid always yields zero utility
        step = v[i] / (grid_points - 1.0)
        for k in range(1, grid_points):
            uk = utility_value(k * step, ls, v[i], p)
            if uk > best:
                best = uk
        ub = utility_value(best_response(ls, v[i], p), ls, v[i], p)
        if ub > best:
            best = ub
        gain = best - base
        if gain > worst_gain:
            worst_gain = gain
            worst_i = i
    return worst_gain, worst_i


@jit
def olos_h_scaled(z, c1, c2, c3, c4, p):
    # h(z) / z^(2p+1); same sign and roots as h for z > 0, but safe from
    # float overflow at bisection midpoints when p is large (z > 1 here,
    # so all powers below are negative)
    e1 = math.exp(-p * math.log(z))  # z^-p
    e2 = e1 / z                      # z^-(p+1)
    e3 = e1 * e1                     # z^-2p
    e4 = e3 / z                      # z^-(2p+1)
    return 1.0 + c1 * e1 - c2 * e2 + c3 * e3 - c4 * e4


@jit
def olos_h_direct(z, c1, c2, c3, c4, p):
    # near the root the terms balance to modest magnitudes; the guarded
    # powers only matter for out-of-range probes
    return (
        guarded_pow(z, 2.0 * p + 1.0)
        + c1 * guarded_pow(z, p + 1.0)
        - c2 * guarded_pow(z, p)
        + c3 * z
        - c4
    )


@jit
def olos_h_prime(z, c1, c2, c3, c4, p):
    return (
        (2.0 * p + 1.0) * guarded_pow(z, 2.0 * p)
        + (p + 1.0) * c1 * guarded_pow(z, p)
        - p * c2 * guarded_pow(z, p - 1.0)
        + c3
    )


@jit
def olos_root(n, alpha, p):
    """Root of h on (alpha^(1/(2p+1)), alpha); returns (z, status).

    status 0: ok; 1: endpoint signs are not (-, +), so the proven bracket
    does not hold numerically.  Bisection runs until the bracket collapses
    to adjacent floats, then as many as five Newton steps on the direct
    polynomial sharpen the root where that evaluation is finite.
    """
    c1 = (n - 2.0) + (1.0 + p) * (n - 1.0)
    c2 = alpha * (1.0 + p) * (n - 1.0)
    c3 = (n - 1.0) * (n - 2.0) * (1.0 + p)
    c4 = alpha * (n - 1.0) * ((1.0 + p) * (n - 2.0) + 1.0)
    lo = math.exp(math.log(alpha) / (2.0 * p + 1.0))
    hi = alpha
    off = 1e-12 * alpha
    if off > 0.25 * (hi - lo):
        off = 0.25 * (hi - lo)
    lo += off
    hi -= off
    flo = olos_h_scaled(lo, c1, c2, c3, c4, p)
    fhi = olos_h_scaled(hi, c1, c2, c3, c4, p)
    if not (flo < 0.0 < fhi):
        return math.nan, 1
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = olos_h_scaled(mid, c1, c2, c3, c4, p)
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
    z = 0.5 * (lo + hi)
    hz = olos_h_direct(z, c1, c2, c3, c4, p)
    for _ in range(5):
        if not math.isfinite(hz):
            break
        dz = olos_h_prime(z, c1, c2, c3, c4, p)
        if not math.isfinite(dz) or dz <= 0.0:
            break
        zn = z - hz / dz
        if not (lo <= zn <= hi):
            break
        hn = olos_h_direct(zn, c1, c2, c3, c4, p)
        if abs(hn) < abs(hz):
            z = zn
            hz = hn
        else:
            break
    return z, 0
