import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs
from oracles import enumerate_estimate

from ginidex.errors import DegenerateDataError, InsufficientSampleError, SizeGuardError
from ginidex.estimators import (
    Sample,
    estimate,
    estimate_brute_force,
    estimate_mth_gini,
    estimate_weighted,
    heatmap_grid,
    position_weights,
    rank_weights,
)
from ginidex.gamma_model import GammaParams, gamma_sample, make_stream
from ginidex.population import IndexSpec

KINDS = ("lower", "upper", "combined")


def both(data, m, i, kind):
    spec = IndexSpec(m, i, kind)
    return estimate_brute_force(data, spec).value, estimate_weighted(data, spec).value


@pytest.mark.parametrize(
    "data,m,i,expected",
    [((1, 2, 3), 2, 1, 0.0), ((1, 2, 3), 2, 2, 1 / 3), ((3, 1, 2), 2, 1, 1 / 4)],
)
def test_worked_examples(data, m, i, expected):
    for v in both(data, m, i, "lower"):
        assert v == pytest.approx(expected, abs=1e-15)


def test_constant_data_is_exactly_zero():
    for kind in KINDS:
        for v in both([2.5] * 6, 3, 2, kind):
            assert v == 0.0


def test_mth_gini_examples():
    assert estimate_mth_gini([1, 2, 3], 2).value == pytest.approx(1 / 3, abs=1e-15)
    assert estimate_mth_gini([1, 2, 3, 4], 2).value == pytest.approx(1 / 3, abs=1e-15)
    assert estimate_mth_gini([7, 7, 7], 3).value == 0.0


def test_position_weights_example_and_vandermonde():
    np.testing.assert_allclose(position_weights(5, 3, 2) * 10, [0, 3, 4, 3, 0], atol=1e-13)
    for n, m in ((9, 4), (60, 7), (500, 5)):
        total = sum(position_weights(n, m, i) for i in range(1, m + 1))
        # sum over i of C(j-1,i-1) C(n-j,m-i) = C(n-1,m-1) for every j, i.e. m/n after normalization
        np.testing.assert_allclose(total, m / n, rtol=1e-12)
        for i in range(1, m + 1):
            assert math.fsum(position_weights(n, m, i)) == pytest.approx(1.0, rel=1e-12)


def test_rank_weights_match_binomials():
    n, m = 12, 4
    vmin, vmax = rank_weights(n, m)
    cnm = math.comb(n, m)
    for k in range(1, n + 1):
        assert vmin[k - 1] == pytest.approx(math.comb(n - k, m - 1) / cnm, rel=1e-13, abs=1e-300)
        assert vmax[k - 1] == pytest.approx(math.comb(k - 1, m - 1) / cnm, rel=1e-13, abs=1e-300)


def test_weights_do_not_overflow_for_large_n():
    w = position_weights(5000, 20, 7)
    assert np.all(np.isfinite(w)) and math.fsum(w) == pytest.approx(1.0, rel=1e-10)


def test_oracle_equivalence_against_enumeration():
    rng = make_stream(77)
    for trial in range(40):
        n = int(rng.integers(2, 10))
        x = gamma_sample(GammaParams(float(rng.uniform(0.3, 4)), 1.0), rng, n)
        for m in range(2, min(n, 5) + 1):
            for i in range(1, m + 1):
                for kind in KINDS:
                    ref = enumerate_estimate(list(x), m, i, kind)
                    bf, w = both(x, m, i, kind)
                    assert bf == pytest.approx(ref, abs=1e-12)
                    assert w == pytest.approx(ref, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(
    hs.lists(hs.floats(min_value=0, max_value=1e3, allow_subnormal=False), min_size=2, max_size=10).filter(
        lambda v: sum(v) > 1e-6
    ),
    hs.data(),
)
def test_decomposition_is_i_constant(values, data):
    m = data.draw(hs.integers(2, len(values)))
    combined = estimate_mth_gini(values, m).value
    for i in range(1, m + 1):
        lo = estimate_weighted(values, IndexSpec(m, i, "lower")).value
        up = estimate_weighted(values, IndexSpec(m, i, "upper")).value
        assert lo >= -1e-12 and up >= -1e-12
        assert lo + up == pytest.approx(combined, abs=1e-12)


@pytest.mark.parametrize("b", [1e-6, 1.0, 1e6])
def test_scale_invariance(b):
    x = gamma_sample(GammaParams(2.0, 1.0), make_stream(3), 40)
    for kind in KINDS:
        spec = IndexSpec(4, 2, kind)
        assert estimate_weighted(x * b, spec).value == pytest.approx(estimate_weighted(x, spec).value, abs=1e-12)


def test_permutation_behaviour():
    x = np.array([4.0, 1.0, 6.0, 2.0, 9.0, 3.0])
    perm = x[[5, 2, 0, 4, 1, 3]]
    assert estimate_mth_gini(perm, 3).value == pytest.approx(estimate_mth_gini(x, 3).value, abs=1e-15)
    spec = IndexSpec(3, 1, "lower")
    assert estimate_weighted(perm, spec).value != pytest.approx(estimate_weighted(x, spec).value, abs=1e-6)


def test_ties_are_interchangeable():
    x = [3.0, 1.0, 3.0, 2.0, 1.0, 3.0]
    for kind in KINDS:
        bf, w = both(x, 3, 2, kind)
        assert w == pytest.approx(bf, abs=1e-14)


def test_subset_monte_carlo_large_n():
    rng = make_stream(2024)
    x = gamma_sample(GammaParams(2.0, 1.0), rng, 2000)
    spec = IndexSpec(4, 2, "lower")
    t0 = time.perf_counter()
    value = estimate_weighted(x, spec).value
    elapsed = time.perf_counter() - t0
    # random index subsets j_1 < ... < j_4, kernel X_{j_2} - min
    idx = np.sort(np.array([rng.choice(2000, 4, replace=False) for _ in range(5000)]), axis=1)
    sub = x[idx]
    kern = (sub[:, 1] - sub.min(axis=1)) / (4 * x.mean())
    se = kern.std(ddof=1) / math.sqrt(kern.size)
    assert abs(value - kern.mean()) < 3 * se
    assert elapsed < 0.05


def test_guards():
    with pytest.raises(InsufficientSampleError):
        estimate_weighted([1.0, 2.0], IndexSpec(3))
    with pytest.raises(InsufficientSampleError):
        heatmap_grid([1.0, 2.0], "lower", 3)
    with pytest.raises(SizeGuardError):
        estimate_brute_force(np.arange(1, 27.0), IndexSpec(2))
    with pytest.raises(ValueError):
        estimate([1.0, 2.0], IndexSpec(2), "bogus")
    for bad in ([], [0.0, 0.0], [1.0, -1.0], [1.0, math.nan]):
        with pytest.raises(DegenerateDataError):
            Sample(bad)


def test_sample_is_immutable():
    s = Sample([1.0, 2.0])
    with pytest.raises(ValueError):
        s.values[0] = 5.0
    assert s.total == 3.0 and s.n == 2 and s.mean == 1.5
    np.testing.assert_array_equal(Sample([3.0, 1.0]).sorted().values, [1.0, 3.0])


def test_heatmap_grid_shape():
    rows = heatmap_grid(np.arange(1.0, 8.0), "lower", 4)
    assert [(m, i) for m, i, _ in rows] == [(m, i) for m in range(2, 5) for i in range(1, m + 1)]
