"""Select the compiled kernels when available, else the pure-Python ones.

Set ``GINIDEX_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and by the parity tests).
"""
from __future__ import annotations

import os

from . import _pycore

BACKEND = "python"
_impl = _pycore

if os.environ.get("GINIDEX_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pycore

inc_gamma_pq = _impl.inc_gamma_pq
inc_gamma_pq_array = _impl.inc_gamma_pq_array
gamma_quantile_std = _impl.gamma_quantile_std
gamma_quantile_std_array = _impl.gamma_quantile_std_array
position_weights = _impl.position_weights
rank_weights = _impl.rank_weights
weighted_sums = _impl.weighted_sums
brute_force_sums = _impl.brute_force_sums

__all__ = [
    "BACKEND",
    "inc_gamma_pq",
    "inc_gamma_pq_array",
    "gamma_quantile_std",
    "gamma_quantile_std_array",
    "position_weights",
    "rank_weights",
    "weighted_sums",
    "brute_force_sums",
]
