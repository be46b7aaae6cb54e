"""Finite-sample estimators of the extended lower/upper Gini indices.

For a sample ``X_1..X_n`` (in collection order) and position ``i`` the
lower estimator averages ``X_{j_i} - min`` over all index combinations
``j_1 < ... < j_m`` and divides by ``m * mean(X)``; the upper one uses
``max - X_{j_i}``. Two algorithms are provided: exhaustive enumeration
(the reference) and a closed-form weighting that is O(n log n).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateDataError, InsufficientSampleError, SizeGuardError
from .population import IndexSpec

BRUTE_FORCE_MAX_N = 25


@dataclass(frozen=True, eq=False)
class Sample:
    """Immutable ordered sample of non-negative observations with positive sum."""

    values: np.ndarray
    total: float

    def __init__(self, values):
        x = np.array(values, dtype=float).ravel()
        if x.size < 1:
            raise DegenerateDataError("sample is empty")
        if not np.all(np.isfinite(x)):
            raise DegenerateDataError("sample contains non-finite values")
        if np.any(x < 0):
            raise DegenerateDataError("sample contains negative values")
        total = math.fsum(x)
        if not total > 0:
            raise DegenerateDataError("sample sum must be positive")
        x.setflags(write=False)
        object.__setattr__(self, "values", x)
        object.__setattr__(self, "total", total)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def mean(self) -> float:
        return self.total / self.n

    def __len__(self):
        return self.n

    def sorted(self) -> "Sample":
        return Sample(np.sort(self.values, kind="stable"))


@dataclass(frozen=True)
class EstimateResult:
    value: float
    spec: IndexSpec
    n: int
    algorithm: str


def _as_sample(data) -> Sample:
    return data if isinstance(data, Sample) else Sample(data)


def _check_size(sample: Sample, m: int):
    if sample.n < m:
        raise InsufficientSampleError(f"need at least m={m} observations, got n={sample.n}")


def estimate_brute_force(data, spec: IndexSpec) -> EstimateResult:
    """Enumerate all C(n, m) combinations; n is capped at 25."""
    sample = _as_sample(data)
    _check_size(sample, spec.m)
    if sample.n > BRUTE_FORCE_MAX_N:
        raise SizeGuardError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}")
    n, m = sample.n, spec.m
    lower, upper, rng = _kernels.brute_force_sums(sample.values, m, spec.i)
    kernel_sum = {"lower": lower, "upper": upper, "combined": rng}[spec.kind]
    # (m-1)! / [(n-1)(n-2)...(n-m+1)]
    prefactor = math.factorial(m - 1) / math.prod(range(n - m + 1, n))
    return EstimateResult(prefactor * kernel_sum / sample.total, spec, n, "brute_force")


def estimate_weighted(data, spec: IndexSpec) -> EstimateResult:
    """Same statistic via combination-count weights.

    Position j contributes to C(j-1, i-1) C(n-j, m-i) subsets as the i-th
    member; the k-th smallest value is the subset minimum C(n-k, m-1) times
    and the maximum C(k-1, m-1) times. Counts are carried as ratios to
    C(n, m), so the result is (mean kernel) / (m * mean).
    """
    sample = _as_sample(data)
    _check_size(sample, spec.m)
    # kernels are translation invariant; centering at the minimum avoids cancellation
    centered = sample.values - sample.values.min()
    pos, mn, mx = _kernels.weighted_sums(centered, spec.m, spec.i)
    kernel_mean = {"lower": pos - mn, "upper": mx - pos, "combined": mx - mn}[spec.kind]
    return EstimateResult(kernel_mean / (spec.m * sample.mean), spec, sample.n, "weighted")


def estimate(data, spec: IndexSpec, algorithm: str = "weighted") -> EstimateResult:
    if algorithm in ("weighted",):
        return estimate_weighted(data, spec)
    if algorithm in ("brute", "brute_force"):
        return estimate_brute_force(data, spec)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def estimate_mth_gini(data, m: int) -> EstimateResult:
    """Normalized mean subset range; equals lower(i) + upper(i) for any i."""
    return estimate_weighted(data, IndexSpec(m, 1, "combined"))


def position_weights(n: int, m: int, i: int) -> np.ndarray:
    """C(j-1, i-1) C(n-j, m-i) / C(n, m) for j = 1..n."""
    return _kernels.position_weights(n, m, i)


def rank_weights(n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """(C(n-k, m-1), C(k-1, m-1)) / C(n, m) for ranks k = 1..n."""
    return _kernels.rank_weights(n, m)


def heatmap_grid(data, kind: str, m_max: int) -> list[tuple[int, int, float]]:
    """Estimates over 2 <= m <= m_max, 1 <= i <= m as ``(m, i, value)`` rows."""
    sample = _as_sample(data)
    _check_size(sample, m_max)
    rows = []
    for m in range(2, m_max + 1):
        for i in range(1, m + 1):
            rows.append((m, i, estimate_weighted(sample, IndexSpec(m, i, kind)).value))
    return rows
