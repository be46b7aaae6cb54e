"""Pure-Python kernels, used when the compiled ``_core`` extension is absent.

Every function here has a twin in ``_core.pyx`` with the same signature and
semantics; ``ginidex._kernels`` picks one set at import time.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import ConvergenceError, DomainError

_FPMIN = 1e-300
_EPS = 2.220446049250313e-16


_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _log1pmx(t):
    """log(1 + t) - t without cancellation for small |t|."""
    if abs(t) >= 0.5:
        return math.log1p(t) - t
    term = t
    total = 0.0
    for k in range(2, 200):
        term *= -t
        total += term / k
        if abs(term / k) <= _EPS * abs(total):
            break
    return total


def _stirlerr(a):
    """lgamma(a) - [(a - 1/2) log a - a + log(2 pi)/2], asymptotic series for a >= 10."""
    r = 1.0 / (a * a)
    return (1 / 12 - r * (1 / 360 - r * (1 / 1260 - r * (1 / 1680 - r * (1 / 1188 - r * 691 / 360360))))) / a


def _log_prefactor(a, x):
    """log(x^a e^-x / Gamma(a)); the large-a form avoids cancelling a log x against x."""
    if a < 10.0:
        return a * math.log(x) - x - math.lgamma(a)
    if 0.5 * a < x < 1.5 * a:
        d = a * _log1pmx((x - a) / a)
    else:
        d = a * (math.log(x) - math.log(a)) - x + a
    return d + 0.5 * math.log(a) - _HALF_LOG_2PI - _stirlerr(a)


def inc_gamma_pq(a, x, rel_eps=1e-12, max_iter=500):
    """Return ``(P(a, x), Q(a, x))``, the regularized incomplete gamma pair.

    Series below ``x = a + 1``, Lentz continued fraction above. The pair is
    returned so callers can use whichever tail is not subject to cancellation.
    """
    if not a > 0.0:
        raise DomainError(f"shape must be positive, got {a!r}")
    if not x >= 0.0:
        raise DomainError(f"x must be non-negative, got {x!r}")
    if x == 0.0:
        return 0.0, 1.0
    if math.isinf(x):
        return 1.0, 0.0
    log_pref = _log_prefactor(a, x)
    if x < a + 1.0:
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(max_iter):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * rel_eps:
                p = total * math.exp(log_pref)
                p = min(p, 1.0)
                return p, 1.0 - p
        raise ConvergenceError(f"incomplete gamma series failed for a={a}, x={x}")
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for k in range(1, max_iter + 1):
        an = -k * (k - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < rel_eps:
            q = min(math.exp(log_pref) * h, 1.0)
            return 1.0 - q, q
    raise ConvergenceError(f"incomplete gamma continued fraction failed for a={a}, x={x}")


def inc_gamma_pq_array(a, x, rel_eps=1e-12, max_iter=500):
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    p = np.empty_like(flat)
    q = np.empty_like(flat)
    for k, xv in enumerate(flat):
        p[k], q[k] = inc_gamma_pq(a, float(xv), rel_eps, max_iter)
    return p.reshape(x.shape), q.reshape(x.shape)


def _log_pq(a, x):
    """(log P(a, x), log Q(a, x), log prefactor) for x > 0, each tail without underflow."""
    # both expansions need O(sqrt(a)) terms near x = a
    max_iter = 500 + int(20.0 * math.sqrt(a))
    log_pref = _log_prefactor(a, x)
    if x < a + 1.0:
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(max_iter):
            ap += 1.0
            term *= x / ap
            total += term
            if term < total * _EPS:
                log_p = log_pref + math.log(total)
                return log_p, _log1mexp(log_p), log_pref
        raise ConvergenceError(f"incomplete gamma series failed for a={a}, x={x}")
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for k in range(1, max_iter + 1):
        an = -k * (k - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            log_q = log_pref + math.log(h)
            return _log1mexp(log_q), log_q, log_pref
    raise ConvergenceError(f"incomplete gamma continued fraction failed for a={a}, x={x}")


def _log1mexp(v):
    """log(1 - e^v) for v <= 0."""
    if v >= 0.0:
        return -math.inf
    if v > -0.693:
        return math.log(-math.expm1(v))
    return math.log1p(-math.exp(v))


def _initial_quantile(a, p):
    # Starting point from Numerical Recipes' invgammp.
    if a > 1.0:
        pp = p if p < 0.5 else 1.0 - p
        t = math.sqrt(-2.0 * math.log(pp))
        x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t
        if p < 0.5:
            x = -x
        return max(1e-3, a * (1.0 - 1.0 / (9.0 * a) - x / (3.0 * math.sqrt(a))) ** 3)
    t = 1.0 - a * (0.253 + a * 0.12)
    if p < t:
        return (p / t) ** (1.0 / a)
    return 1.0 - math.log1p(-(p - t) / (1.0 - t))


_U_MIN = -740.0


def gamma_quantile_std(a, p, tol=1e-14, max_iter=200):
    """Quantile of Gamma(a, rate 1): the ``x`` with ``P(a, x) = p``.

    Newton steps in u = log x on the log of the tail holding the target
    (log P below the median, log Q above), kept inside a bracket with
    bisection as the fallback. Tiny quantiles come from the leading series
    term, which is exact in double once x < 1e-16.
    """
    if not a > 0.0:
        raise DomainError(f"shape must be positive, got {a!r}")
    if not 0.0 <= p < 1.0:
        raise DomainError(f"probability must lie in [0, 1), got {p!r}")
    if p == 0.0:
        return 0.0
    log_x = (math.log(p) + math.lgamma(a + 1.0)) / a
    if log_x < -37.0:
        return math.exp(log_x)
    lower = p <= 0.5
    target = math.log(p) if lower else math.log1p(-p)
    x0 = _initial_quantile(a, p)
    if log_x < -5.0:
        x0 = min(x0, math.exp(log_x))
    u = math.log(x0)
    lo, hi = -math.inf, math.inf
    for _ in range(max_iter):
        log_p, log_q, log_pref = _log_pq(a, math.exp(u))
        # g increases with u in both tails
        if lower:
            g = log_p - target
            slope = math.exp(log_pref - log_p)
        else:
            g = target - log_q
            slope = math.exp(log_pref - log_q)
        if g == 0.0:
            return math.exp(u)
        if g > 0.0:
            hi = min(hi, u)
        else:
            lo = max(lo, u)
        u_new = u - g / slope if slope > 0.0 and math.isfinite(slope) else math.nan
        if not (lo < u_new < hi):
            if math.isfinite(lo) and math.isfinite(hi):
                u_new = 0.5 * (lo + hi)
            elif math.isfinite(hi):
                u_new = max(hi - 2.0, _U_MIN)
            else:
                u_new = lo + 2.0
        if abs(u_new - u) <= tol or (math.isfinite(lo) and math.isfinite(hi) and hi - lo <= tol):
            return math.exp(u_new)
        u = u_new
    raise ConvergenceError(f"gamma quantile failed for a={a}, p={p}")


def gamma_quantile_std_array(a, p):
    p = np.asarray(p, dtype=float)
    flat = p.ravel()
    out = np.empty_like(flat)
    for k, pv in enumerate(flat):
        out[k] = gamma_quantile_std(a, float(pv))
    return out.reshape(p.shape)


def _log_position_weights(n, m, i):
    # log[C(j-1, i-1) C(n-j, m-i) / C(n, m)] for j = i .. n-m+i
    log_w = sum(math.log((m - t) / (n - t)) for t in range(i))
    out = [log_w]
    for j in range(i, n - m + i):
        log_w += math.log(j / (j - i + 1)) + math.log((n - j - m + i) / (n - j))
        out.append(log_w)
    return out


def position_weights(n, m, i):
    w = np.zeros(n)
    logs = _log_position_weights(n, m, i)
    w[i - 1 : i - 1 + len(logs)] = np.exp(logs)
    return w


def rank_weights(n, m):
    """Normalized counts of subsets in which rank k is the minimum / maximum."""
    vmin = np.zeros(n)
    vmax = np.zeros(n)
    v = m / n
    for k in range(1, n - m + 2):
        vmin[k - 1] = v
        if n - k > 0:
            v *= (n - k - m + 1) / (n - k)
    u = m / n
    for k in range(n, m - 1, -1):
        vmax[k - 1] = u
        if k > 1:
            u *= (k - m) / (k - 1)
    return vmin, vmax


def weighted_sums(values, m, i):
    """Return ``(position, minimum, maximum)`` kernel means over all m-subsets."""
    x = np.asarray(values, dtype=float)
    n = x.shape[0]
    order = np.argsort(x, kind="stable")
    s = x[order]
    w = position_weights(n, m, i)
    vmin, vmax = rank_weights(n, m)
    pos = math.fsum(w * x)
    mn = math.fsum(vmin * s)
    mx = math.fsum(vmax * s)
    return pos, mn, mx


def brute_force_sums(values, m, i):
    """Raw kernel sums ``(lower, upper, range)`` over every index combination."""
    x = [float(v) for v in values]
    lower = []
    upper = []
    rng = []
    for combo in itertools.combinations(x, m):
        lo = min(combo)
        hi = max(combo)
        xi = combo[i - 1]
        lower.append(xi - lo)
        upper.append(hi - xi)
        rng.append(hi - lo)
    return math.fsum(lower), math.fsum(upper), math.fsum(rng)
