"""Population extended Gini indices.

Three independent routes are provided for a distribution model:

* survival integrals of ``1 - F`` and its powers,
* the quantile (covariance) form, an integral of ``F^{-1}`` against a weight,
* the Lorenz form through the Aaberge ``D_n`` and generalized Gini ``G_n``,

plus single-integral gamma formulas, the m-th Gini index and the shift
constants that map each component onto a classical Gini coefficient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .errors import DomainError, UndefinedShiftError
from .gamma_model import GammaParams, gamma_cdf, gamma_quantile, gamma_sf
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate, integrate_semi_infinite, integrate_unit
from .specfun import inc_gamma_pq

KINDS = ("lower", "upper", "combined")
REPRESENTATIONS = ("survival", "quantile_covariance", "lorenz", "gamma_closed_path")

_ONE_MINUS = np.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class IndexSpec:
    m: int
    i: int = 1
    kind: str = "lower"

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise DomainError(f"m must be an integer >= 2, got {self.m!r}")
        if int(self.i) != self.i or not 1 <= self.i <= self.m:
            raise DomainError(f"i must lie in 1..m, got {self.i!r}")
        if self.kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class IndexValue:
    value: float
    representation: str
    est_error: float = 0.0


@dataclass(frozen=True)
class DistributionModel:
    """Non-negative law given by vectorized ``cdf``/``quantile`` and its mean.

    ``survival`` and ``lorenz`` are optional accurate overrides; without them
    ``1 - cdf`` and a nested quantile integral are used.
    """

    cdf: Callable[[np.ndarray], np.ndarray]
    quantile: Callable[[np.ndarray], np.ndarray]
    mean: float
    survival: Callable[[np.ndarray], np.ndarray] | None = None
    lorenz: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if not self.mean > 0:
            raise DomainError("model mean must be positive")

    def sf(self, t):
        if self.survival is not None:
            return self.survival(t)
        return 1.0 - self.cdf(t)


def gamma_distribution(params: GammaParams) -> DistributionModel:
    a = params.alpha

    def lorenz(p):
        # share of mass below the p-quantile: P(a + 1, lambda * F^{-1}(p))
        x = _kernels.gamma_quantile_std_array(a, np.minimum(np.asarray(p, float), _ONE_MINUS))
        return inc_gamma_pq(a + 1.0, x)[0]

    return DistributionModel(
        cdf=lambda t: gamma_cdf(params, np.maximum(t, 0.0)),
        quantile=lambda u: gamma_quantile(params, u),
        mean=params.mean,
        survival=lambda t: gamma_sf(params, np.maximum(t, 0.0)),
        lorenz=lorenz,
        name=f"gamma({a:g}, {params.lam:g})",
    )


def exponential_distribution(rate: float = 1.0) -> DistributionModel:
    """Exponential law with closed-form cdf/quantile and no Lorenz shortcut."""
    return DistributionModel(
        cdf=lambda t: -np.expm1(-rate * np.maximum(t, 0.0)),
        quantile=lambda u: -np.log1p(-np.asarray(u, float)) / rate,
        mean=1.0 / rate,
        survival=lambda t: np.exp(-rate * np.maximum(t, 0.0)),
        name=f"exponential({rate:g})",
    )


def point_mass(mu: float) -> DistributionModel:
    return DistributionModel(
        cdf=lambda t: (np.asarray(t, float) >= mu).astype(float),
        quantile=lambda u: np.full(np.shape(u), float(mu)),
        mean=float(mu),
        survival=lambda t: (np.asarray(t, float) < mu).astype(float),
        name=f"point_mass({mu:g})",
    )


def shifted(model: DistributionModel, a: float) -> DistributionModel:
    """Law of ``X + a`` for a >= 0."""
    if not a >= 0:
        raise DomainError("shift must be non-negative")
    mu = model.mean
    lorenz = None
    if model.lorenz is not None:
        base = model.lorenz
        lorenz = lambda p: (mu * base(p) + a * np.asarray(p, float)) / (mu + a)  # noqa: E731

    def cdf(t):
        t = np.asarray(t, float)
        return np.where(t < a, 0.0, model.cdf(np.maximum(t - a, 0.0)))

    def sf(t):
        t = np.asarray(t, float)
        return np.where(t < a, 1.0, model.sf(np.maximum(t - a, 0.0)))

    return DistributionModel(
        cdf=cdf,
        quantile=lambda u: model.quantile(u) + a,
        mean=mu + a,
        survival=sf,
        lorenz=lorenz,
        name=f"{model.name}+{a:g}",
    )


def scaled(model: DistributionModel, b: float) -> DistributionModel:
    """Law of ``b * X`` for b > 0."""
    if not b > 0:
        raise DomainError("scale factor must be positive")
    return DistributionModel(
        cdf=lambda t: model.cdf(np.asarray(t, float) / b),
        quantile=lambda u: b * model.quantile(u),
        mean=b * model.mean,
        survival=lambda t: model.sf(np.asarray(t, float) / b),
        lorenz=model.lorenz,
        name=f"{b:g}*{model.name}",
    )


def _check_m(m):
    if int(m) != m or m < 2:
        raise DomainError(f"m must be an integer >= 2, got {m!r}")


def _ratio(num, e_num, den, e_den, m, representation):
    value = num / (m * den)
    err = e_num / (m * den) + abs(num) * e_den / (m * den * den)
    return IndexValue(value, representation, err)


def _survival_integrals(model, m, cfg, upper):
    def numerator(t):
        f = np.asarray(model.cdf(t), float)
        s = np.asarray(model.sf(t), float)
        with np.errstate(divide="ignore"):
            if upper:
                # F^1 - F^m = F (1 - F^{m-1}), with F^{m-1} taken through S
                return f * -np.expm1((m - 1) * np.log1p(-s))
            # S - S^m = S (1 - S^{m-1}), with S^{m-1} taken through F
            return s * -np.expm1((m - 1) * np.log1p(-f))

    def survival(t):
        return np.asarray(model.sf(t), float)

    num = integrate_semi_infinite(numerator, cfg, scale=model.mean)
    den = integrate_semi_infinite(survival, cfg, scale=model.mean)
    return num, den


def lower_index_survival(model: DistributionModel, m: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> IndexValue:
    """[int (1-F) - int (1-F)^m] / [m int (1-F)]."""
    _check_m(m)
    num, den = _survival_integrals(model, m, cfg, upper=False)
    return _ratio(num.value, num.error, den.value, den.error, m, "survival")


def upper_index_survival(model: DistributionModel, m: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> IndexValue:
    """[int (1-F^m) - int (1-F)] / [m int (1-F)]."""
    _check_m(m)
    num, den = _survival_integrals(model, m, cfg, upper=True)
    return _ratio(num.value, num.error, den.value, den.error, m, "survival")


def _quantile_weight(kind, m):
    if kind == "lower":
        return lambda u: 1.0 - m * (1.0 - u) ** (m - 1)
    if kind == "upper":
        return lambda u: m * u ** (m - 1) - 1.0
    return lambda u: m * (u ** (m - 1) - (1.0 - u) ** (m - 1))


def index_quantile_covariance(
    model: DistributionModel, spec: IndexSpec, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> IndexValue:
    """(1 / (m mu)) int_0^1 F^{-1}(u) w(u) du with the kind's covariance weight."""
    m = spec.m
    weight = _quantile_weight(spec.kind, m)

    def integrand(u):
        u = np.minimum(u, _ONE_MINUS)
        return np.asarray(model.quantile(u), float) * weight(u)

    r = integrate_unit(integrand, cfg)
    scale = m * model.mean
    return IndexValue(r.value / scale, "quantile_covariance", r.error / scale)


def _lorenz_values(model: DistributionModel, p: np.ndarray, cfg: QuadratureConfig) -> np.ndarray:
    p = np.asarray(p, float)
    if model.lorenz is not None:
        return np.asarray(model.lorenz(p), float)

    def q(t):
        return np.asarray(model.quantile(np.minimum(t, _ONE_MINUS)), float)

    out = np.empty(p.shape)
    flat = out.reshape(-1)
    for k, pk in enumerate(p.reshape(-1)):
        flat[k] = 0.0 if pk <= 0.0 else integrate(q, 0.0, float(pk), cfg).value / model.mean
    return out


def lorenz_curve(model: DistributionModel, p: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """L(p) = int_0^p F^{-1}(t) dt / mu."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return 0.0
    return float(_lorenz_values(model, np.array([p]), cfg)[0])


def _lorenz_moment(model, power_of, cfg):
    def integrand(u):
        return (u - _lorenz_values(model, u, cfg)) * power_of(u)

    return integrate_unit(integrand, cfg)


def aaberge_D(model: DistributionModel, n: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """D_n = (n + 1) E[{U - L(U)} U^{n-1}]."""
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    r = _lorenz_moment(model, lambda u: u ** (n - 1), cfg)
    return (n + 1) * r.value


def kakwani_G(model: DistributionModel, n: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """G_n = n (n - 1) E[{U - L(U)} (1 - U)^{n-2}]."""
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if n == 1:
        return 0.0
    r = _lorenz_moment(model, lambda u: (1.0 - u) ** (n - 2), cfg)
    return n * (n - 1) * r.value


def index_lorenz(model: DistributionModel, spec: IndexSpec, cfg: QuadratureConfig = DEFAULT_CONFIG) -> IndexValue:
    """Lower = G_m / m, upper = (1 - 1/m) D_{m-1}."""
    m = spec.m
    parts = []
    if spec.kind in ("lower", "combined"):
        r = _lorenz_moment(model, lambda u: (1.0 - u) ** (m - 2), cfg)
        parts.append(((m - 1) * r.value, (m - 1) * r.error))
    if spec.kind in ("upper", "combined"):
        r = _lorenz_moment(model, lambda u: u ** (m - 2), cfg)
        parts.append(((m - 1) * r.value, (m - 1) * r.error))
    return IndexValue(math.fsum(p[0] for p in parts), "lorenz", sum(p[1] for p in parts))


def gamma_lower_index(params: GammaParams, m: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> IndexValue:
    """(1/m) [1 - (1/alpha) int_0^inf Q(alpha, t)^m dt]; free of the rate."""
    _check_m(m)
    a = params.alpha

    def integrand(t):
        return inc_gamma_pq(a, t)[1] ** m

    r = integrate_semi_infinite(integrand, cfg, scale=a)
    return IndexValue((1.0 - r.value / a) / m, "gamma_closed_path", r.error / (a * m))


def gamma_upper_index(params: GammaParams, m: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> IndexValue:
    """(1/m) [(1/alpha) int_0^inf {1 - P(alpha, t)^m} dt - 1]."""
    _check_m(m)
    a = params.alpha

    def integrand(t):
        q = inc_gamma_pq(a, t)[1]
        with np.errstate(divide="ignore"):
            return -np.expm1(m * np.log1p(-q))

    r = integrate_semi_infinite(integrand, cfg, scale=a)
    return IndexValue((r.value / a - 1.0) / m, "gamma_closed_path", r.error / (a * m))


def gamma_gini(alpha: float) -> float:
    """Classical Gini of a gamma law, Gamma(a + 1/2) / (Gamma(a + 1) sqrt(pi))."""
    return math.exp(math.lgamma(alpha + 0.5) - math.lgamma(alpha + 1.0)) / math.sqrt(math.pi)


def index_value(
    model: DistributionModel,
    spec: IndexSpec,
    representation: str = "survival",
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> IndexValue:
    """Dispatch on representation; ``combined`` sums the two components."""
    if representation == "survival":
        parts = []
        if spec.kind in ("lower", "combined"):
            parts.append(lower_index_survival(model, spec.m, cfg))
        if spec.kind in ("upper", "combined"):
            parts.append(upper_index_survival(model, spec.m, cfg))
        return IndexValue(math.fsum(p.value for p in parts), "survival", sum(p.est_error for p in parts))
    if representation == "quantile_covariance":
        return index_quantile_covariance(model, spec, cfg)
    if representation == "lorenz":
        return index_lorenz(model, spec, cfg)
    raise DomainError(f"unknown representation {representation!r}")


def gamma_index_value(params: GammaParams, spec: IndexSpec, cfg: QuadratureConfig = DEFAULT_CONFIG) -> IndexValue:
    parts = []
    if spec.kind in ("lower", "combined"):
        parts.append(gamma_lower_index(params, spec.m, cfg))
    if spec.kind in ("upper", "combined"):
        parts.append(gamma_upper_index(params, spec.m, cfg))
    return IndexValue(math.fsum(p.value for p in parts), "gamma_closed_path", sum(p.est_error for p in parts))


def mth_gini(model: DistributionModel, m: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """IG_m: normalized expected range of an m-sample, as lower + upper."""
    return lower_index_survival(model, m, cfg).value + upper_index_survival(model, m, cfg).value


def classical_gini(model: DistributionModel, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    return mth_gini(model, 2, cfg)


def shift_constants(model: DistributionModel, m: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """Shifts r_m, s_m with G(X + r_m) = IG_{m;min}(X) and G(X + s_m) = IG_{m;max}(X).

    Uses G(X + r) = mu G(X) / (mu + r).
    """
    _check_m(m)
    mu = model.mean
    g = classical_gini(model, cfg)
    lo = lower_index_survival(model, m, cfg).value
    up = upper_index_survival(model, m, cfg).value
    tiny = 1e-14
    if lo <= tiny or up <= tiny:
        raise UndefinedShiftError("a component index is zero (degenerate law); no finite shift exists")
    return mu * (g - lo) / lo, mu * (g - up) / up
