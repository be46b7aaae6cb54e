"""Compare the compiled and pure-Python kernel backends.

Kernel timings call both implementations directly; end-to-end timings run a
fresh interpreter per backend so ``GINIDEX_PURE_PYTHON`` takes effect.

    python benchmarks/bench_core.py [--repeat 5] [--json out.json]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from ginidex import _pycore

try:
    from ginidex import _core
except ImportError:  # extension not built
    _core = None

RNG = np.random.default_rng(0)
X_SMALL = RNG.gamma(2.0, size=20)
X_LARGE = RNG.gamma(2.0, size=100_000)
GRID = np.linspace(0.0, 30.0, 2000)
PROBS = np.linspace(0.0, 0.999, 500)

KERNELS = {
    "inc_gamma_pq_array (2000 pts)": lambda m: m.inc_gamma_pq_array(3.5, GRID),
    "gamma_quantile_std_array (500 pts)": lambda m: m.gamma_quantile_std_array(3.5, PROBS),
    "weighted_sums (n=1e5, m=5)": lambda m: m.weighted_sums(X_LARGE, 5, 3),
    "brute_force_sums (n=20, m=5)": lambda m: m.brute_force_sums(X_SMALL, 5, 2),
}

END_TO_END = {
    "gamma index, all kinds m=2..6": (
        "from ginidex import GammaParams, IndexSpec, gamma_index_value\n"
        "for m in range(2, 7):\n"
        "    for k in ('lower', 'upper'):\n"
        "        gamma_index_value(GammaParams(2.0, 1.0), IndexSpec(m, 1, k))"
    ),
    "simulation, 500 reps x 5 sizes": (
        "from ginidex import GammaParams, IndexSpec, SimulationPlan, run_simulation\n"
        "run_simulation(SimulationPlan(GammaParams(2.0, 1.0), IndexSpec(3, 3), (10, 30, 50, 100, 200), 500, 1))"
    ),
}


def best_of(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.05 and number < 10_000:
        number *= 4
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def time_script(code: str, pure: bool, repeat: int) -> float:
    env = dict(os.environ)
    env.pop("GINIDEX_PURE_PYTHON", None)
    if pure:
        env["GINIDEX_PURE_PYTHON"] = "1"
    runner = (
        "import time\n"
        "import ginidex\n"
        f"t = time.perf_counter()\n{code}\nprint(time.perf_counter() - t)"
    )
    runs = [
        float(subprocess.run([sys.executable, "-c", runner], env=env, capture_output=True, text=True, check=True).stdout)
        for _ in range(repeat)
    ]
    return min(runs)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--json", metavar="FILE", help="also write results as JSON")
    args = parser.parse_args(argv)
    if _core is None:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1

    rows = []
    for name, fn in KERNELS.items():
        t_c = best_of(lambda: fn(_core), args.repeat)
        t_p = best_of(lambda: fn(_pycore), args.repeat)
        rows.append({"case": name, "cython_s": t_c, "python_s": t_p, "speedup": t_p / t_c})
    for name, code in END_TO_END.items():
        t_c = time_script(code, False, min(args.repeat, 3))
        t_p = time_script(code, True, min(args.repeat, 3))
        rows.append({"case": name, "cython_s": t_c, "python_s": t_p, "speedup": t_p / t_c})

    width = max(len(r["case"]) for r in rows)
    print(f"{'case':<{width}}  {'cython':>10}  {'python':>10}  {'speedup':>8}")
    for r in rows:
        print(f"{r['case']:<{width}}  {r['cython_s']:>9.4g}s  {r['python_s']:>9.4g}s  {r['speedup']:>7.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
