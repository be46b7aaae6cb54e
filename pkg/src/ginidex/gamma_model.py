"""Gamma(shape, rate) model: distribution functions, sampling and MLE."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DegenerateDataError, DomainError
from .specfun import DEFAULT_TOL, Tolerance, digamma, inc_gamma_pq, trigamma

RandomStream = np.random.Generator


@dataclass(frozen=True)
class GammaParams:
    alpha: float
    lam: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"shape must be positive and finite, got {self.alpha!r}")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise DomainError(f"rate must be positive and finite, got {self.lam!r}")

    @property
    def mean(self) -> float:
        return self.alpha / self.lam

    @property
    def variance(self) -> float:
        return self.alpha / self.lam**2

    @property
    def scale(self) -> float:
        return 1.0 / self.lam


@dataclass(frozen=True)
class FitResult:
    params: GammaParams
    log_likelihood: float
    iterations: int
    converged: bool


def make_stream(seed, *keys: int) -> RandomStream:
    """Independent PCG64 stream derived from ``seed`` and integer ``keys``.

    Streams derived with different key tuples are statistically independent,
    so ``make_stream(s, n, r)`` can be handed to any worker.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def gamma_pdf(params: GammaParams, x):
    x = np.asarray(x, dtype=float)
    a, lam = params.alpha, params.lam
    with np.errstate(divide="ignore", invalid="ignore"):
        logpdf = a * math.log(lam) + (a - 1) * np.log(x) - lam * x - math.lgamma(a)
    out = np.exp(logpdf)
    return np.where(x < 0, 0.0, out)


def gamma_cdf(params: GammaParams, x, tol: Tolerance = DEFAULT_TOL):
    """F(x) = P(alpha, lambda x); scalar in, scalar out."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("gamma_cdf requires x >= 0")
    p, _ = inc_gamma_pq(params.alpha, params.lam * xa, tol)
    return float(p) if p.ndim == 0 else p


def gamma_sf(params: GammaParams, x, tol: Tolerance = DEFAULT_TOL):
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("gamma_sf requires x >= 0")
    _, q = inc_gamma_pq(params.alpha, params.lam * xa, tol)
    return float(q) if q.ndim == 0 else q


def gamma_quantile(params: GammaParams, p):
    pa = np.asarray(p, dtype=float)
    if np.any((pa < 0) | (pa >= 1)) or np.any(np.isnan(pa)):
        raise DomainError("gamma_quantile requires p in [0, 1)")
    x = _kernels.gamma_quantile_std_array(params.alpha, pa) / params.lam
    return float(x) if x.ndim == 0 else x


def _standard_gamma_mt(alpha: float, rng: RandomStream, count: int) -> np.ndarray:
    """Marsaglia-Tsang squeeze sampler for Gamma(alpha, 1), alpha >= 1."""
    d = alpha - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(count)
    filled = 0
    while filled < count:
        need = count - filled
        batch = int(need * 1.1) + 16
        z = rng.standard_normal(batch)
        u = rng.random(batch)
        v = (1.0 + c * z) ** 3
        ok = v > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            logv = np.log(np.where(ok, v, 1.0))
            accept = ok & (
                (u < 1.0 - 0.0331 * z**4)
                | (np.log(u) < 0.5 * z * z + d * (1.0 - v + logv))
            )
        draws = (d * v)[accept][:need]
        out[filled : filled + draws.size] = draws
        filled += draws.size
    return out


def gamma_sample(params: GammaParams, rng: RandomStream, count: int) -> np.ndarray:
    """``count`` Gamma(alpha, lambda) draws; deterministic given the stream state."""
    if count < 1:
        raise DomainError("count must be positive")
    a = params.alpha
    if a >= 1.0:
        std = _standard_gamma_mt(a, rng, count)
    else:
        # boost: G(a) = G(a + 1) * U**(1/a)
        std = _standard_gamma_mt(a + 1.0, rng, count)
        std *= rng.random(count) ** (1.0 / a)
    return std / params.lam


def gamma_log_likelihood(params: GammaParams, data) -> float:
    x = np.asarray(data, dtype=float)
    n = x.size
    a, lam = params.alpha, params.lam
    return float(
        n * (a * math.log(lam) - math.lgamma(a))
        + (a - 1.0) * math.fsum(np.log(x))
        - lam * math.fsum(x)
    )


def _mle_inputs(data):
    x = np.asarray(data, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise DegenerateDataError("gamma MLE needs at least two observations")
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DegenerateDataError("gamma MLE needs strictly positive finite data")
    mean = math.fsum(x) / x.size
    s = math.log(mean) - math.fsum(np.log(x)) / x.size
    if not s > 0 or np.all(x == x[0]):
        raise DegenerateDataError("all observations are equal; shape MLE diverges")
    return x, mean, s


def gamma_mle(data, tol: Tolerance = Tolerance(rel_eps=1e-12, max_iter=100)) -> FitResult:
    """Maximum-likelihood Gamma fit.

    Newton iteration on the profile equation ln(a) - digamma(a) = ln(mean) -
    mean(ln x), started at the moment estimate; the rate follows as a / mean.
    """
    x, mean, s = _mle_inputs(data)
    var = float(np.var(x, ddof=1))
    a = mean * mean / var if var > 0 else 1.0
    converged = False
    it = 0
    for it in range(1, tol.max_iter + 1):
        g = math.log(a) - digamma(a) - s
        if abs(g) <= tol.rel_eps:
            converged = True
            break
        dg = 1.0 / a - trigamma(a)
        a_new = a - g / dg
        while a_new <= 0:
            a_new = 0.5 * (a + max(a_new, 0.0))
            if a_new <= 0:
                a_new = 0.5 * a
        if abs(a_new - a) <= 1e-15 * a:
            a = a_new
            converged = abs(math.log(a) - digamma(a) - s) <= max(tol.rel_eps, 1e-13)
            break
        a = a_new
    if not converged:
        raise ConvergenceError(f"gamma MLE did not converge in {tol.max_iter} iterations")
    params = GammaParams(a, a / mean)
    return FitResult(params, gamma_log_likelihood(params, x), it, True)


def gamma_mle_bisection(data, rel_tol: float = 1e-15) -> GammaParams:
    """Independent MLE solver: bisection on the (decreasing) profile equation."""
    x, mean, s = _mle_inputs(data)

    def g(a):
        return math.log(a) - digamma(a) - s

    lo, hi = 1e-8, 1.0
    while g(hi) > 0:
        lo, hi = hi, hi * 2.0
    while g(lo) < 0:
        lo *= 0.5
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    a = 0.5 * (lo + hi)
    return GammaParams(a, a / mean)
