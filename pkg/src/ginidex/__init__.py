"""Extended lower and upper Gini indices.

Population values by quadrature (survival, quantile-covariance and Lorenz
representations), finite-sample estimators, a gamma model with maximum
likelihood fitting, Monte Carlo studies and goodness-of-fit tests.
"""
__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import (
    ConvergenceError,
    DegenerateDataError,
    DomainError,
    GinidexError,
    InsufficientSampleError,
    NonFiniteIntegrandError,
    QuadratureError,
    SizeGuardError,
    UndefinedShiftError,
)
from .estimators import (
    EstimateResult,
    Sample,
    estimate,
    estimate_brute_force,
    estimate_mth_gini,
    estimate_weighted,
    heatmap_grid,
)
from .fixtures import load_fixture
from .gamma_model import FitResult, GammaParams, gamma_mle, gamma_sample, make_stream
from .inference import SimulationPlan, SimulationReport, gof_test, run_simulation
from .population import (
    DistributionModel,
    IndexSpec,
    IndexValue,
    classical_gini,
    exponential_distribution,
    gamma_distribution,
    gamma_gini,
    gamma_index_value,
    index_value,
    mth_gini,
    shift_constants,
)
from .quadrature import QuadratureConfig

__all__ = [name for name in dir() if not name.startswith("_")]
