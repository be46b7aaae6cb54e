# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; mirror of ``ginidex._pycore``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, expm1, log, log1p, lgamma, sqrt, fabs, pow, isinf, isfinite, NAN, INFINITY

from .errors import ConvergenceError, DomainError

cnp.import_array()

cdef double _FPMIN = 1e-300
cdef double _EPS = 2.220446049250313e-16
cdef double _HALF_LOG_2PI = 0.9189385332046727


cdef double _log1pmx(double t) noexcept nogil:
    # log(1 + t) - t without cancellation for small |t|
    cdef double term = t, total = 0.0
    cdef int k
    if fabs(t) >= 0.5:
        return log1p(t) - t
    for k in range(2, 200):
        term *= -t
        total += term / k
        if fabs(term / k) <= _EPS * fabs(total):
            break
    return total


cdef double _stirlerr(double a) noexcept nogil:
    cdef double r = 1.0 / (a * a)
    return (1.0 / 12 - r * (1.0 / 360 - r * (1.0 / 1260 - r * (1.0 / 1680
            - r * (1.0 / 1188 - r * 691.0 / 360360))))) / a


cdef double _log_prefactor(double a, double x) noexcept nogil:
    # log(x^a e^-x / Gamma(a)); large-a form avoids cancelling a log x against x
    cdef double d
    if a < 10.0:
        return a * log(x) - x - lgamma(a)
    if 0.5 * a < x < 1.5 * a:
        d = a * _log1pmx((x - a) / a)
    else:
        d = a * (log(x) - log(a)) - x + a
    return d + 0.5 * log(a) - _HALF_LOG_2PI - _stirlerr(a)


cdef int _pq(double a, double x, double rel_eps, int max_iter,
             double* p, double* q) noexcept nogil:
    """Fill P and Q; return 0 on success, 1 on non-convergence."""
    cdef double log_pref, ap, term, total, b, c, d, h, an, delta, v
    cdef int k
    if x == 0.0:
        p[0] = 0.0
        q[0] = 1.0
        return 0
    if isinf(x):
        p[0] = 1.0
        q[0] = 0.0
        return 0
    log_pref = _log_prefactor(a, x)
    if x < a + 1.0:
        ap = a
        term = 1.0 / a
        total = term
        for k in range(max_iter):
            ap += 1.0
            term *= x / ap
            total += term
            if fabs(term) < fabs(total) * rel_eps:
                v = total * exp(log_pref)
                if v > 1.0:
                    v = 1.0
                p[0] = v
                q[0] = 1.0 - v
                return 0
        return 1
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for k in range(1, max_iter + 1):
        an = -k * (k - a)
        b += 2.0
        d = an * d + b
        if fabs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if fabs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < rel_eps:
            v = exp(log_pref) * h
            if v > 1.0:
                v = 1.0
            q[0] = v
            p[0] = 1.0 - v
            return 0
    return 1


def inc_gamma_pq(double a, double x, double rel_eps=1e-12, int max_iter=500):
    cdef double p, q
    if not a > 0.0:
        raise DomainError(f"shape must be positive, got {a!r}")
    if not x >= 0.0:
        raise DomainError(f"x must be non-negative, got {x!r}")
    if _pq(a, x, rel_eps, max_iter, &p, &q):
        raise ConvergenceError(f"incomplete gamma failed for a={a}, x={x}")
    return p, q


def inc_gamma_pq_array(double a, x, double rel_eps=1e-12, int max_iter=500):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs, ps, qs
    cdef Py_ssize_t k, n
    cdef int bad = 0
    arr = np.asarray(x, dtype=np.float64)
    if not a > 0.0:
        raise DomainError(f"shape must be positive, got {a!r}")
    xs = np.ascontiguousarray(arr.ravel())
    n = xs.shape[0]
    ps = np.empty(n)
    qs = np.empty(n)
    for k in range(n):
        if not xs[k] >= 0.0:
            raise DomainError(f"x must be non-negative, got {xs[k]!r}")
    with nogil:
        for k in range(n):
            if _pq(a, xs[k], rel_eps, max_iter, &ps[k], &qs[k]):
                bad = 1
                break
    if bad:
        raise ConvergenceError(f"incomplete gamma failed for a={a}")
    return ps.reshape(arr.shape), qs.reshape(arr.shape)


cdef double _log1mexp(double v) noexcept nogil:
    # log(1 - e^v) for v <= 0
    if v >= 0.0:
        return -INFINITY
    if v > -0.693:
        return log(-expm1(v))
    return log1p(-exp(v))


cdef int _log_pq(double a, double x, double* log_p, double* log_q, double* log_pref) noexcept nogil:
    """Both tails in log form for x > 0; 0 on success."""
    # both expansions need O(sqrt(a)) terms near x = a
    cdef int max_iter = 500 + <int>(20.0 * sqrt(a))
    cdef double ap, term, total, b, c, d, h, an, delta
    cdef int k
    log_pref[0] = _log_prefactor(a, x)
    if x < a + 1.0:
        ap = a
        term = 1.0 / a
        total = term
        for k in range(max_iter):
            ap += 1.0
            term *= x / ap
            total += term
            if term < total * _EPS:
                log_p[0] = log_pref[0] + log(total)
                log_q[0] = _log1mexp(log_p[0])
                return 0
        return 1
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for k in range(1, max_iter + 1):
        an = -k * (k - a)
        b += 2.0
        d = an * d + b
        if fabs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if fabs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < _EPS:
            log_q[0] = log_pref[0] + log(h)
            log_p[0] = _log1mexp(log_q[0])
            return 0
    return 1


cdef double _initial_quantile(double a, double p) noexcept nogil:
    cdef double pp, t, x
    if a > 1.0:
        pp = p if p < 0.5 else 1.0 - p
        t = sqrt(-2.0 * log(pp))
        x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t
        if p < 0.5:
            x = -x
        x = a * pow(1.0 - 1.0 / (9.0 * a) - x / (3.0 * sqrt(a)), 3)
        return x if x > 1e-3 else 1e-3
    t = 1.0 - a * (0.253 + a * 0.12)
    if p < t:
        return pow(p / t, 1.0 / a)
    return 1.0 - log1p(-(p - t) / (1.0 - t))


cdef double _U_MIN = -740.0


cdef int _quantile(double a, double p, double tol, int max_iter, double* out) noexcept nogil:
    # Newton in u = log x on the log of the tail holding the target, bracketed
    cdef double log_x, target, x0, u, lo = -INFINITY, hi = INFINITY
    cdef double lp, lq, lpref, g, slope, u_new
    cdef bint lower = p <= 0.5
    cdef int it
    if p == 0.0:
        out[0] = 0.0
        return 0
    # P(a, x) = x^a / Gamma(a + 1) * (1 + O(x)); exact in double once x < 1e-16
    log_x = (log(p) + lgamma(a + 1.0)) / a
    if log_x < -37.0:
        out[0] = exp(log_x)
        return 0
    target = log(p) if lower else log1p(-p)
    x0 = _initial_quantile(a, p)
    if log_x < -5.0 and exp(log_x) < x0:
        x0 = exp(log_x)
    u = log(x0)
    for it in range(max_iter):
        if _log_pq(a, exp(u), &lp, &lq, &lpref):
            return 1
        # g increases with u in both tails
        if lower:
            g = lp - target
            slope = exp(lpref - lp)
        else:
            g = target - lq
            slope = exp(lpref - lq)
        if g == 0.0:
            out[0] = exp(u)
            return 0
        if g > 0.0:
            if u < hi:
                hi = u
        elif u > lo:
            lo = u
        if slope > 0.0 and isfinite(slope):
            u_new = u - g / slope
        else:
            u_new = NAN
        if not (lo < u_new < hi):
            if isfinite(lo) and isfinite(hi):
                u_new = 0.5 * (lo + hi)
            elif isfinite(hi):
                u_new = hi - 2.0
                if u_new < _U_MIN:
                    u_new = _U_MIN
            else:
                u_new = lo + 2.0
        if fabs(u_new - u) <= tol or (isfinite(lo) and isfinite(hi) and hi - lo <= tol):
            out[0] = exp(u_new)
            return 0
        u = u_new
    return 1


def gamma_quantile_std(double a, double p, double tol=1e-14, int max_iter=200):
    cdef double out
    if not a > 0.0:
        raise DomainError(f"shape must be positive, got {a!r}")
    if not (0.0 <= p < 1.0):
        raise DomainError(f"probability must lie in [0, 1), got {p!r}")
    if _quantile(a, p, tol, max_iter, &out):
        raise ConvergenceError(f"gamma quantile failed for a={a}, p={p}")
    return out


def gamma_quantile_std_array(double a, p):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ps, xs
    cdef Py_ssize_t k, n
    cdef int bad = 0
    arr = np.asarray(p, dtype=np.float64)
    if not a > 0.0:
        raise DomainError(f"shape must be positive, got {a!r}")
    ps = np.ascontiguousarray(arr.ravel())
    n = ps.shape[0]
    xs = np.empty(n)
    for k in range(n):
        if not (0.0 <= ps[k] < 1.0):
            raise DomainError(f"probability must lie in [0, 1), got {ps[k]!r}")
    with nogil:
        for k in range(n):
            if _quantile(a, ps[k], 1e-14, 200, &xs[k]):
                bad = 1
                break
    if bad:
        raise ConvergenceError(f"gamma quantile failed for a={a}")
    return xs.reshape(arr.shape)


def position_weights(Py_ssize_t n, Py_ssize_t m, Py_ssize_t i):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.zeros(n)
    cdef double log_w = 0.0
    cdef Py_ssize_t t, j
    for t in range(i):
        log_w += log(<double>(m - t) / <double>(n - t))
    w[i - 1] = exp(log_w)
    for j in range(i, n - m + i):
        log_w += log(<double>j / <double>(j - i + 1)) + log(<double>(n - j - m + i) / <double>(n - j))
        w[j] = exp(log_w)
    return w


def rank_weights(Py_ssize_t n, Py_ssize_t m):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vmin = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vmax = np.zeros(n)
    cdef double v = <double>m / n
    cdef Py_ssize_t k
    for k in range(1, n - m + 2):
        vmin[k - 1] = v
        if n - k > 0:
            v *= <double>(n - k - m + 1) / <double>(n - k)
    v = <double>m / n
    for k in range(n, m - 1, -1):
        vmax[k - 1] = v
        if k > 1:
            v *= <double>(k - m) / <double>(k - 1)
    return vmin, vmax


cdef double _ksum(const double[::1] a, const double[::1] b) noexcept nogil:
    # Neumaier-compensated dot product
    cdef double s = 0.0, c = 0.0, t, y
    cdef Py_ssize_t k
    for k in range(a.shape[0]):
        y = a[k] * b[k]
        t = s + y
        if fabs(s) >= fabs(y):
            c += (s - t) + y
        else:
            c += (y - t) + s
        s = t
    return s + c


def weighted_sums(values, Py_ssize_t m, Py_ssize_t i):
    x = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    s = np.ascontiguousarray(x[np.argsort(x, kind="stable")])
    w = position_weights(n, m, i)
    vmin, vmax = rank_weights(n, m)
    return _ksum(w, x), _ksum(vmin, s), _ksum(vmax, s)


def brute_force_sums(values, Py_ssize_t m, Py_ssize_t i):
    cdef const double[::1] x = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t[::1] c = np.arange(m, dtype=np.intp)
    cdef Py_ssize_t k, pos
    cdef double lo, hi, v, xi
    cdef double s_lo = 0.0, s_up = 0.0, s_rg = 0.0
    cdef double c_lo = 0.0, c_up = 0.0, c_rg = 0.0, y, t
    if m > n:
        return 0.0, 0.0, 0.0
    with nogil:
        while True:
            lo = x[c[0]]
            hi = lo
            for k in range(1, m):
                v = x[c[k]]
                if v < lo:
                    lo = v
                if v > hi:
                    hi = v
            xi = x[c[i - 1]]
            # Kahan accumulation for each kernel sum
            y = (xi - lo) - c_lo
            t = s_lo + y
            c_lo = (t - s_lo) - y
            s_lo = t
            y = (hi - xi) - c_up
            t = s_up + y
            c_up = (t - s_up) - y
            s_up = t
            y = (hi - lo) - c_rg
            t = s_rg + y
            c_rg = (t - s_rg) - y
            s_rg = t
            # next combination in lexicographic order
            pos = m - 1
            while pos >= 0 and c[pos] == n - m + pos:
                pos -= 1
            if pos < 0:
                break
            c[pos] += 1
            for k in range(pos + 1, m):
                c[k] = c[k - 1] + 1
    return s_lo, s_up, s_rg
