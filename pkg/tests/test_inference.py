import numpy as np
import pytest
import scipy.stats as st

from ginidex.errors import DomainError
from ginidex.fixtures import load_fixture
from ginidex.gamma_model import GammaParams, gamma_sample, make_stream
from ginidex.inference import (
    DegenerateReplicatesWarning,
    SimulationPlan,
    consistency_check,
    cvm_statistic,
    gof_test,
    ks_statistic,
    normality_pvalue,
    normality_smoke,
    population_truth,
    run_simulation,
    summarize,
)
from ginidex.population import IndexSpec

PLAN = SimulationPlan(GammaParams(2.0, 1.0), IndexSpec(3, 3), (10, 30), 40, 8128)


def test_plan_validation():
    with pytest.raises(DomainError):
        SimulationPlan(GammaParams(2.0, 1.0), IndexSpec(3), (2,), 10, 1)
    with pytest.raises(DomainError):
        SimulationPlan(GammaParams(2.0, 1.0), IndexSpec(3), (10,), 1, 1)
    with pytest.raises(DomainError):
        SimulationPlan(GammaParams(2.0, 1.0), IndexSpec(3), (), 10, 1)


def test_summarize_matches_numpy():
    est = np.array([0.1, 0.3, 0.25, 0.2, 0.15])
    bias, mse, se = summarize(est, 0.2)
    assert bias == pytest.approx(est.mean() - 0.2, abs=1e-16)
    assert mse == pytest.approx(np.mean((est - 0.2) ** 2), abs=1e-16)
    assert se == pytest.approx(est.std(ddof=1) / np.sqrt(5), rel=1e-14)
    assert summarize(est[::-1], 0.2) == (bias, mse, se)


def test_simulation_is_thread_independent_and_deterministic():
    one = run_simulation(PLAN, threads=1)
    four = run_simulation(PLAN, threads=4)
    assert one.to_csv() == four.to_csv() == run_simulation(PLAN).to_csv()
    np.testing.assert_array_equal(one.estimates[(30, "upper")], four.estimates[(30, "upper")])


def test_simulation_report_layout():
    rep = run_simulation(PLAN)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "n,kind,bias,mse,mc_se,truth"
    assert len(lines) == 1 + 2 * 2
    row = rep.row(30, "upper")
    truth = population_truth(PLAN.params, 3)["upper"]
    assert row.population_truth == truth and row.replicate_count == 40
    assert row.mse == pytest.approx(row.bias**2 + np.var(rep.estimates[(30, "upper")]), rel=1e-10)
    with pytest.raises(KeyError):
        rep.row(99, "lower")


def test_seed_changes_output():
    other = SimulationPlan(PLAN.params, PLAN.spec, PLAN.sample_sizes, PLAN.replications, 8129)
    assert run_simulation(other).to_csv() != run_simulation(PLAN).to_csv()


def test_consistency_check():
    assert consistency_check(GammaParams(2.0, 1.0), IndexSpec(3, 1, "lower"), 5000, 8128) < 0.02
    with pytest.raises(DomainError):
        consistency_check(GammaParams(2.0, 1.0), IndexSpec(3), 999, 1)


def test_statistics_match_scipy():
    x = gamma_sample(GammaParams(3.0, 1.0), make_stream(12), 60)
    u = st.gamma(3.0).cdf(x)
    assert ks_statistic(u) == pytest.approx(st.kstest(x, st.gamma(3.0).cdf).statistic, abs=1e-14)
    assert cvm_statistic(u) == pytest.approx(st.cramervonmises(x, st.gamma(3.0).cdf).statistic, abs=1e-13)


def test_normality_pvalue():
    z = make_stream(4).standard_normal(500)
    assert normality_pvalue(z) > 1e-3
    assert normality_pvalue(make_stream(4).exponential(size=500) ** 3) < 1e-3
    with pytest.warns(DegenerateReplicatesWarning):
        assert normality_pvalue(np.full(10, 0.3)) == 0.0


def test_normality_smoke_at_moderate_n():
    plan = SimulationPlan(GammaParams(2.0, 1.0), IndexSpec(3, 2, "upper"), (200,), 300, 8128)
    assert normality_smoke(plan, threads=2) > 1e-3
    with pytest.raises(DomainError):
        normality_smoke(PLAN)


def test_gof_fixture_plugin_values():
    x = load_fixture("gdp2023")
    exact = gof_test(x, "plugin_exact")
    assert exact.p_value_ks == pytest.approx(0.5079, abs=1e-3)
    assert exact.p_value_cvm == pytest.approx(0.7734, abs=1e-3)
    asym = gof_test(x, "plugin_asymptotic")
    assert asym.p_value_ks == pytest.approx(0.581, abs=2e-3)
    assert asym.statistic_ks == exact.statistic_ks
    assert exact.n == 11 and exact.fitted.converged


def test_gof_bootstrap_is_seeded():
    x = load_fixture("gdp2023")
    a = gof_test(x, "parametric_bootstrap", boot=2000, seed=8128)
    b = gof_test(x, "parametric_bootstrap", boot=2000, seed=8128)
    assert a == b and a.bootstrap_replicates == 2000
    assert 0 < a.p_value_ks <= 1 and 0 < a.p_value_cvm <= 1


def test_gof_null_smoke():
    for seed in range(5):
        x = gamma_sample(GammaParams(4.0, 0.01), make_stream(seed, 99), 80)
        rep = gof_test(x)
        assert rep.p_value_ks > 1e-3 and rep.p_value_cvm > 1e-3


def test_gof_uses_asymptotic_law_above_exact_range():
    x = gamma_sample(GammaParams(2.0, 1.0), make_stream(3), 1500)
    assert gof_test(x, "plugin_exact").p_value_ks == gof_test(x, "plugin_asymptotic").p_value_ks


def test_gof_guards():
    with pytest.raises(DomainError):
        gof_test([1.0, 2.0, 3.0], "bogus")
    with pytest.raises(DomainError):
        gof_test([1.0, 2.0])
    with pytest.raises(DomainError):
        gof_test(load_fixture("gdp2023"), "parametric_bootstrap", boot=100)
