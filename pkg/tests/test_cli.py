import argparse
import io
import json
import shutil
import subprocess

import numpy as np
import pytest

from ginidex.cli import build_parser, main, read_dataset, run_estimate
from ginidex.estimators import estimate
from ginidex.fixtures import SOURCE_URL, fixture_rows, load_fixture
from ginidex.population import IndexSpec

# Frozen from exhaustive enumeration of the 55 pairs of the bundled fixture
GDP_PAIRED_COMBINED = 0.2642393208626956
TABLE = [
    ("Guyana", 49315.16), ("Uruguay", 31019.31), ("Chile", 29462.64), ("Argentina", 27104.98),
    ("Suriname", 19043.71), ("Brazil", 19018.24), ("Colombia", 18692.38), ("Paraguay", 15783.11),
    ("Peru", 15294.26), ("Ecuador", 14472.32), ("Bolivia", 9843.97),
]


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    assert code == 0, text
    payload = json.loads(text)
    assert payload["schema_version"] == 1
    return payload


@pytest.fixture
def write_csv(tmp_path):
    def _write(text, name="data.csv"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return _write


def test_fixture_contents_and_provenance():
    assert fixture_rows("gdp2023") == TABLE
    assert SOURCE_URL.startswith("https://ourworldindata.org/")
    with pytest.raises(KeyError):
        fixture_rows("nope")


def test_index_examples():
    p = run_json("index", "--dist", "gamma", "--alpha", "1", "--lambda", "1", "--m", "3", "--kind", "lower")
    assert p["value"] == pytest.approx(2 / 9, abs=1e-6)
    assert set(p) >= {"value", "representation", "est_error"}
    p = run_json("index", "--dist", "gamma", "--alpha", "2", "--lambda", "7", "--m", "2", "--kind", "combined")
    assert p["value"] == pytest.approx(0.375, abs=1e-9)


def test_index_all_paths_report_gap():
    p = run_json("index", "--alpha", "2", "--lambda", "1", "--m", "4", "--kind", "upper", "--repr", "all")
    assert set(p["paths"]) == {"survival", "quantile", "lorenz", "gamma"}
    assert p["max_gap"] < 1e-9


def test_index_from_data_fits_gamma_first():
    p = run_json("index", "--fixture", "gdp2023", "--m", "3", "--repr", "gamma")
    assert p["model"]["source"] == "fitted"
    assert p["model"]["alpha"] == pytest.approx(5.470626784, rel=1e-9)


def test_usage_errors_exit_2():
    assert run("index", "--alpha", "1", "--lambda", "1")[0] == 2
    assert run("index", "--m", "3")[0] == 2
    assert run("index", "--alpha", "1", "--lambda", "1", "--m", "1")[0] == 2
    assert run("bogus")[0] == 2
    assert run("simulate", "--sizes", "a,b")[0] == 2


def test_estimate_examples(write_csv):
    p = run_json("estimate", "--fixture", "gdp2023", "--m", "2", "--i", "1", "--kind", "combined")
    assert p["value"] == pytest.approx(GDP_PAIRED_COMBINED, rel=1e-9)
    assert p["n"] == 11 and p["algorithm"] == "weighted"
    p = run_json("estimate", "--fixture", "gdp2023", "--m", "2", "--kind", "combined", "--algorithm", "brute")
    assert p["value"] == pytest.approx(GDP_PAIRED_COMBINED, rel=1e-9)
    p = run_json("estimate", "--data", write_csv("1\n2\n3\n"), "--m", "2", "--i", "2", "--kind", "lower")
    assert p["value"] == pytest.approx(1 / 3, abs=1e-9)
    p = run_json("estimate", "--data", write_csv("4\n4\n4\n4\n"), "--m", "3", "--kind", "upper")
    assert p["value"] == 0.0


def test_estimate_error_codes(write_csv):
    assert run("estimate", "--data", write_csv("1\n2\n"), "--m", "3")[0] == 4
    assert run("estimate", "--data", write_csv("1\nabc\n3\n"), "--m", "2")[0] == 3
    assert run("estimate", "--data", write_csv("1\n-2\n3\n"), "--m", "2")[0] == 3
    assert run("estimate", "--data", write_csv("0\n0\n0\n"), "--m", "2")[0] == 5
    assert run("estimate", "--data", "/nonexistent.csv", "--m", "2")[0] == 3
    assert run("estimate", "--m", "2")[0] == 2


def test_round_trip_is_bit_for_bit(write_csv):
    path = write_csv("\n".join(repr(float(v)) for v in np.random.default_rng(1).gamma(2.0, size=15)) + "\n")
    argv = ["estimate", "--data", path, "--m", "4", "--i", "3", "--kind", "upper"]
    lib = estimate(read_dataset(path), IndexSpec(4, 3, "upper")).value
    assert run_estimate(build_parser().parse_args(argv)).value == lib
    assert run_json(*argv)["value"] == float(f"{lib:.10g}")


def test_reader_header_and_columns(write_csv):
    path = write_csv("country,gdp\nA,1.5\nB,2.5\n")
    np.testing.assert_array_equal(read_dataset(path, "gdp").values, [1.5, 2.5])
    code, _ = run("fit", "--data", path)
    assert code == 3
    assert run_json("fit", "--data", path, "--column", "gdp")["n"] == 2
    np.testing.assert_array_equal(read_dataset(write_csv("value\n3\n\n4\n")).values, [3.0, 4.0])


def test_fit_examples(write_csv):
    p = run_json("fit", "--fixture", "gdp2023")
    assert p["converged"] is True
    assert p["alpha"] == pytest.approx(5.470626783913254, rel=1e-6)
    assert p["lambda"] == pytest.approx(0.00024162567875122057, rel=1e-6)
    doubled = write_csv("\n".join(str(2 * v) for _, v in TABLE) + "\n")
    q = run_json("fit", "--data", doubled)
    assert q["alpha"] == pytest.approx(p["alpha"], rel=1e-6)
    assert q["lambda"] == pytest.approx(p["lambda"] / 2, rel=1e-6)
    assert run("fit", "--data", write_csv("5\n"))[0] == 5


def test_simulate_smoke_and_determinism(monkeypatch):
    argv = ["simulate", "--reps", "2", "--seed", "8128"]
    code, text = run(*argv)
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "n,kind,bias,mse,mc_se,truth" and len(lines) == 11
    assert all(np.isfinite(float(c)) for line in lines[1:] for c in line.split(",")[2:])
    assert run(*argv)[1] == text
    assert run(*argv, "--threads", "3")[1] == text
    monkeypatch.setenv("GINIDEX_SEED", "8128")
    assert run("simulate", "--reps", "2")[1] == text
    monkeypatch.setenv("GINIDEX_SEED", "1")
    assert run("simulate", "--reps", "2")[1] != text


def test_gof_examples(write_csv):
    p = run_json("gof", "--fixture", "gdp2023", "--method", "plugin")
    assert abs(p["p_value_ks"] - 0.508) <= 0.05
    assert abs(p["p_value_cvm"] - 0.784) <= 0.07
    x = np.random.default_rng(5).gamma(3.0, 2.0, size=60)
    q = run_json("gof", "--data", write_csv("\n".join(repr(float(v)) for v in x) + "\n"))
    assert q["p_value_ks"] > 1e-3 and q["p_value_cvm"] > 1e-3
    assert run("gof", "--data", write_csv("3\n3\n3\n3\n"))[0] == 5


def test_gof_bootstrap_flag():
    p = run_json("gof", "--fixture", "gdp2023", "--method", "bootstrap", "--boot", "2000", "--seed", "8128")
    assert p["bootstrap_replicates"] == 2000


def heatmap(*argv):
    code, text = run("heatmap", *argv)
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "m,i,value"
    return {(int(m), int(i)): float(v) for m, i, v in (line.split(",") for line in lines[1:])}


def test_heatmap_monotone_on_sorted_fixture():
    grid = heatmap("--fixture", "gdp2023", "--kind", "lower", "--m-max", "6", "--sort", "asc")
    for m in range(2, 7):
        vals = [grid[(m, i)] for i in range(1, m + 1)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_heatmap_decomposition_and_small_grid():
    lo = heatmap("--fixture", "gdp2023", "--kind", "lower", "--m-max", "5")
    up = heatmap("--fixture", "gdp2023", "--kind", "upper", "--m-max", "5")
    for m in range(2, 6):
        sums = [lo[(m, i)] + up[(m, i)] for i in range(1, m + 1)]
        assert max(sums) - min(sums) < 2e-6  # CSV carries 6 significant digits
    assert set(heatmap("--fixture", "gdp2023", "--m-max", "2")) == {(2, 1), (2, 2)}
    assert run("heatmap", "--fixture", "gdp2023", "--m-max", "12")[0] == 4


def test_sorted_fixture_matches_library():
    x = load_fixture("gdp2023").sorted()
    p = run_json("estimate", "--fixture", "gdp2023", "--m", "3", "--i", "2", "--sort", "asc")
    assert p["value"] == float(f"{estimate(x, IndexSpec(3, 2)).value:.10g}")


def test_sizes_parser():
    args = build_parser().parse_args(["simulate", "--sizes", "10, 20,30"])
    assert args.sizes == (10, 20, 30)
    with pytest.raises(SystemExit):
        build_parser().parse_args(["simulate", "--sizes", "0"])
    assert isinstance(build_parser(), argparse.ArgumentParser)


@pytest.mark.skipif(shutil.which("ginidex") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["ginidex", "fit", "--fixture", "gdp2023"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["command"] == "fit"
    res = subprocess.run(["ginidex", "index"], capture_output=True, text=True)
    assert res.returncode == 2
