"""Scalar special functions: log-gamma, incomplete gamma, polygamma and the
null distributions of the Kolmogorov-Smirnov and Cramer-von Mises statistics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import kve

from . import _kernels
from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class Tolerance:
    rel_eps: float = 1e-12
    abs_eps: float = 1e-15
    max_iter: int = 500

    def __post_init__(self):
        if not self.rel_eps > 0:
            raise DomainError("rel_eps must be positive")
        if not self.abs_eps >= 0:
            raise DomainError("abs_eps must be non-negative")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")


DEFAULT_TOL = Tolerance()


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def reg_lower_inc_gamma(alpha: float, x: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Regularized lower incomplete gamma P(alpha, x) = gamma(alpha, x) / Gamma(alpha)."""
    return _kernels.inc_gamma_pq(float(alpha), float(x), tol.rel_eps, tol.max_iter)[0]


def reg_upper_inc_gamma(alpha: float, x: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Q(alpha, x) = 1 - P(alpha, x), computed without cancellation in the upper tail."""
    return _kernels.inc_gamma_pq(float(alpha), float(x), tol.rel_eps, tol.max_iter)[1]


def inc_gamma_pq(alpha, x, tol: Tolerance = DEFAULT_TOL):
    """Vectorized ``(P, Q)`` pair over an array of ``x``."""
    return _kernels.inc_gamma_pq_array(float(alpha), x, tol.rel_eps, tol.max_iter)


# Bernoulli-number coefficients B_2k / (2k) of the digamma expansion
_PSI_COEF = (1 / 12, -1 / 120, 1 / 252, -1 / 240, 1 / 132, -691 / 32760, 1 / 12)
# B_2k coefficients of the trigamma expansion
_PSI1_COEF = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)


def digamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"digamma requires x > 0, got {x!r}")
    acc = 0.0
    while x < 6.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for c in _PSI_COEF:
        series += c * power
        power *= inv2
    return acc + math.log(x) - 0.5 / x - series


def trigamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"trigamma requires x > 0, got {x!r}")
    acc = 0.0
    while x < 6.0:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = 0.0
    power = inv * inv2
    for c in _PSI1_COEF:
        series += c * power
        power *= inv2
    return acc + inv + 0.5 * inv2 + series


def _kolmogorov_limit(x: float) -> float:
    """Limiting Kolmogorov CDF K(x) = Pr(sup|B(t)| <= x)."""
    if x <= 0.0:
        return 0.0
    if x < 1.18:
        # Jacobi-theta form, converges fast for small x
        y = -math.pi**2 / (8.0 * x * x)
        total = 0.0
        k = 1
        while True:
            term = math.exp((2 * k - 1) ** 2 * y)
            total += term
            if term < 1e-12 * total or term == 0.0:
                break
            k += 1
        return min(1.0, math.sqrt(2.0 * math.pi) / x * total)
    total = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * x * x)
        total += term if k % 2 else -term
        if term < 1e-12:
            break
        k += 1
    return max(0.0, 1.0 - 2.0 * total)


def _mat_power_scaled(h: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    """Return ``(M, log_scale)`` with ``h**n = M * exp(log_scale)``."""
    result = np.eye(h.shape[0])
    log_scale = 0.0
    base = h.copy()
    base_log = 0.0
    while n:
        if n & 1:
            result = result @ base
            log_scale += base_log
            s = np.abs(result).max()
            if s > 0:
                result /= s
                log_scale += math.log(s)
        n >>= 1
        if n:
            base = base @ base
            base_log *= 2
            s = np.abs(base).max()
            if s > 0:
                base /= s
                base_log += math.log(s)
    return result, log_scale


def _kolmogorov_exact(d: float, n: int) -> float:
    # Marsaglia, Tsang & Wang (2003) matrix formulation of Pr(D_n < d).
    s = d * d * n
    if s > 7.24 or (s > 3.76 and n > 99):
        return 1.0 - 2.0 * math.exp(-(2.000071 + 0.331 / math.sqrt(n) + 1.409 / n) * s)
    k = int(n * d) + 1
    dim = 2 * k - 1
    h = k - n * d
    idx = np.arange(dim)
    diff = idx[:, None] - idx[None, :] + 1
    hm = (diff >= 0).astype(float)
    powers = h ** np.arange(1, dim + 1)
    hm[:, 0] -= powers
    hm[dim - 1, :] -= powers[::-1]
    if 2 * h - 1 > 0:
        hm[dim - 1, 0] += (2 * h - 1) ** dim
    fact = np.array([math.factorial(int(v)) if v > 0 else 1 for v in diff.ravel()], dtype=float)
    hm = np.where(diff > 0, hm / fact.reshape(diff.shape), hm)
    q, log_scale = _mat_power_scaled(hm, n)
    entry = q[k - 1, k - 1]
    if entry <= 0.0:
        return 0.0
    log_p = math.log(entry) + log_scale + math.lgamma(n + 1) - n * math.log(n)
    return min(1.0, math.exp(log_p))


def kolmogorov_cdf(d: float, n: int, mode: str = "exact") -> float:
    """Null CDF Pr(D_n <= d) of the one-sample KS statistic.

    ``mode="exact"`` uses the Marsaglia-Tsang-Wang matrix algorithm and is
    restricted to n <= 1000; ``mode="asymptotic"`` returns K(sqrt(n) d).
    """
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if not d >= 0:
        raise DomainError(f"d must be non-negative, got {d!r}")
    if d >= 1.0:
        return 1.0
    if mode == "asymptotic":
        return _kolmogorov_limit(math.sqrt(n) * d)
    if mode != "exact":
        raise DomainError(f"unknown mode {mode!r}")
    if n > 1000:
        raise DomainError("exact mode requires n <= 1000")
    if d <= 0.5 / n:
        return 0.0
    return _kolmogorov_exact(d, n)


def cvm_asymptotic_cdf(w2: float) -> float:
    """Limiting null CDF of the Cramer-von Mises W^2 statistic (Anderson-Darling series)."""
    if not w2 >= 0:
        raise DomainError(f"w2 must be non-negative, got {w2!r}")
    if w2 == 0.0:
        return 0.0
    total = 0.0
    k = 0
    lead = 1.0 / (math.pi**1.5 * math.sqrt(w2))
    while True:
        y = 4 * k + 1
        q = y * y / (16.0 * w2)
        coef = math.exp(math.lgamma(k + 0.5) - math.lgamma(k + 1.0))
        term = lead * coef * math.sqrt(y) * math.exp(-2.0 * q) * float(kve(0.25, q))
        total += term
        if term < 1e-12:
            break
        k += 1
    return min(1.0, total)
