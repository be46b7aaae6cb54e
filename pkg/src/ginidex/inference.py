"""Monte Carlo bias/MSE studies, large-sample checks and gamma goodness of fit."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .estimators import Sample, estimate_weighted
from .gamma_model import FitResult, GammaParams, gamma_cdf, gamma_mle, gamma_sample, make_stream
from .population import IndexSpec, gamma_index_value
from .quadrature import DEFAULT_CONFIG, QuadratureConfig
from .specfun import cvm_asymptotic_cdf, kolmogorov_cdf

GOF_METHODS = ("plugin_asymptotic", "plugin_exact", "parametric_bootstrap")
SIM_KINDS = ("lower", "upper")


class DegenerateReplicatesWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SimulationPlan:
    params: GammaParams
    spec: IndexSpec
    sample_sizes: tuple[int, ...]
    replications: int
    master_seed: int

    def __post_init__(self):
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        if self.replications < 2:
            raise DomainError("replications must be at least 2")
        if not self.sample_sizes:
            raise DomainError("at least one sample size is required")
        for n in self.sample_sizes:
            if n < self.spec.m:
                raise DomainError(f"sample size {n} is below m={self.spec.m}")


@dataclass(frozen=True)
class SimulationRow:
    n: int
    kind: str
    bias: float
    mse: float
    mc_standard_error: float
    population_truth: float
    replicate_count: int
    mean_estimate: float


@dataclass
class SimulationReport:
    plan: SimulationPlan
    rows: list[SimulationRow]
    estimates: dict = field(default_factory=dict, repr=False)

    def row(self, n: int, kind: str) -> SimulationRow:
        for r in self.rows:
            if r.n == n and r.kind == kind:
                return r
        raise KeyError((n, kind))

    def to_csv(self) -> str:
        lines = ["n,kind,bias,mse,mc_se,truth"]
        for r in self.rows:
            lines.append(
                f"{r.n},{r.kind},{r.bias:.6g},{r.mse:.6g},{r.mc_standard_error:.6g},{r.population_truth:.6g}"
            )
        return "\n".join(lines) + "\n"


def population_truth(params: GammaParams, m: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> dict[str, float]:
    return {kind: gamma_index_value(params, IndexSpec(m, 1, kind), cfg).value for kind in SIM_KINDS}


def _replicate(plan: SimulationPlan, n: int, r: int) -> tuple[float, float]:
    rng = make_stream(plan.master_seed, n, r)
    x = gamma_sample(plan.params, rng, n)
    sample = Sample(x)
    m, i = plan.spec.m, plan.spec.i
    lo = estimate_weighted(sample, IndexSpec(m, i, "lower")).value
    up = estimate_weighted(sample, IndexSpec(m, i, "upper")).value
    return lo, up


def summarize(estimates: np.ndarray, truth: float) -> tuple[float, float, float]:
    """Return (bias, mse, mc_se); fsum makes the result order independent."""
    est = np.asarray(estimates, dtype=float)
    k = est.size
    dev = est - truth
    bias = math.fsum(dev) / k
    mse = math.fsum(dev * dev) / k
    mean = math.fsum(est) / k
    var = math.fsum((est - mean) ** 2) / (k - 1)
    return bias, mse, math.sqrt(var / k)


def run_simulation(
    plan: SimulationPlan, threads: int = 1, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> SimulationReport:
    """Replicate the estimators on gamma samples and compare with quadrature truth.

    Replicate ``r`` at size ``n`` draws from the stream derived from
    ``(master_seed, n, r)``, so the report does not depend on ``threads``.
    """
    truth = population_truth(plan.params, plan.spec.m, cfg)
    rows = []
    estimates = {}
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for n in plan.sample_sizes:
            jobs = range(plan.replications)
            if pool is None:
                results = [_replicate(plan, n, r) for r in jobs]
            else:
                results = list(pool.map(lambda r: _replicate(plan, n, r), jobs))
            arr = np.array(results)
            for col, kind in enumerate(SIM_KINDS):
                est = arr[:, col]
                estimates[(n, kind)] = est
                bias, mse, se = summarize(est, truth[kind])
                rows.append(SimulationRow(n, kind, bias, mse, se, truth[kind], est.size, math.fsum(est) / est.size))
    finally:
        if pool is not None:
            pool.shutdown()
    return SimulationReport(plan, rows, estimates)


def consistency_check(params: GammaParams, spec: IndexSpec, n_large: int, seed: int) -> float:
    """|estimate - truth| for one sample of size ``n_large``."""
    if n_large < 1000:
        raise DomainError("n_large must be at least 1000")
    rng = make_stream(seed, n_large)
    x = gamma_sample(params, rng, n_large)
    est = estimate_weighted(Sample(x), spec).value
    return abs(est - gamma_index_value(params, spec).value)


def _normal_cdf(z):
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def ks_statistic(u) -> float:
    """sup |F_n - F| from model CDF values ``u`` at the observations."""
    u = np.sort(np.asarray(u, dtype=float))
    n = u.size
    k = np.arange(1, n + 1)
    return float(max(np.max(k / n - u), np.max(u - (k - 1) / n)))


def cvm_statistic(u) -> float:
    """W^2 = 1/(12 n) + sum (u_(k) - (2k - 1)/(2n))^2."""
    u = np.sort(np.asarray(u, dtype=float))
    n = u.size
    k = np.arange(1, n + 1)
    return float(1.0 / (12 * n) + math.fsum((u - (2 * k - 1) / (2 * n)) ** 2))


def normality_pvalue(estimates) -> float:
    """KS p-value (asymptotic law) of standardized replicates against N(0, 1)."""
    est = np.asarray(estimates, dtype=float)
    sd = float(np.std(est, ddof=1)) if est.size > 1 else 0.0
    if not sd > 1e-12 * max(float(np.max(np.abs(est))), 1e-300):
        warnings.warn("replicates have zero spread; normality rejected", DegenerateReplicatesWarning)
        return 0.0
    z = (est - est.mean()) / sd
    u = np.array([_normal_cdf(v) for v in z])
    d = ks_statistic(u)
    return 1.0 - kolmogorov_cdf(d, est.size, "asymptotic")


def normality_smoke(plan: SimulationPlan, threads: int = 1) -> float:
    if len(plan.sample_sizes) != 1:
        raise DomainError("normality smoke uses a single sample size")
    n = plan.sample_sizes[0]
    m, i = plan.spec.m, plan.spec.i
    kind = plan.spec.kind

    def one(r):
        x = gamma_sample(plan.params, make_stream(plan.master_seed, n, r), n)
        return estimate_weighted(Sample(x), IndexSpec(m, i, kind)).value

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            est = list(pool.map(one, range(plan.replications)))
    else:
        est = [one(r) for r in range(plan.replications)]
    return normality_pvalue(est)


@dataclass(frozen=True)
class GofReport:
    statistic_ks: float
    p_value_ks: float
    statistic_cvm: float
    p_value_cvm: float
    method: str
    fitted: FitResult
    n: int
    bootstrap_replicates: int = 0


def _gof_statistics(x: np.ndarray, params: GammaParams) -> tuple[float, float]:
    u = gamma_cdf(params, np.sort(x))
    return ks_statistic(u), cvm_statistic(u)


def gof_test(data, method: str = "plugin_exact", boot: int = 2000, seed: int = 0) -> GofReport:
    """KS and CvM tests of a maximum-likelihood gamma fit.

    Plug-in methods use the known-parameter null laws (KS exact for n <= 1000
    under ``plugin_exact``); ``parametric_bootstrap`` refits on ``boot``
    synthetic samples and reports (1 + #exceedances) / (boot + 1).
    """
    if method not in GOF_METHODS:
        raise DomainError(f"method must be one of {GOF_METHODS}")
    x = np.asarray(data.values if isinstance(data, Sample) else data, dtype=float)
    n = x.size
    if n < 3:
        raise DomainError("goodness of fit needs n >= 3")
    fit = gamma_mle(x)
    d, w2 = _gof_statistics(x, fit.params)
    if method == "parametric_bootstrap":
        if boot < 2000:
            raise DomainError("parametric bootstrap needs at least 2000 replicates")
        exceed_d = 0
        exceed_w = 0
        for b in range(boot):
            xb = gamma_sample(fit.params, make_stream(seed, n, b), n)
            fb = gamma_mle(xb)
            db, wb = _gof_statistics(xb, fb.params)
            exceed_d += db >= d
            exceed_w += wb >= w2
        return GofReport(d, (1 + exceed_d) / (boot + 1), w2, (1 + exceed_w) / (boot + 1), method, fit, n, boot)
    mode = "exact" if method == "plugin_exact" and n <= 1000 else "asymptotic"
    p_ks = 1.0 - kolmogorov_cdf(d, n, mode)
    p_cvm = 1.0 - cvm_asymptotic_cdf(w2)
    return GofReport(d, min(max(p_ks, 0.0), 1.0), w2, min(max(p_cvm, 0.0), 1.0), method, fit, n)
