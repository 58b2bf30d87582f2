"""Joint caching, computing and bandwidth allocation for multi-user edge VR
delivery with a min-max fairness objective."""

from .model import (
    ChannelParams,
    ContentCatalog,
    ConvergenceError,
    CostWeights,
    DeviceProfile,
    InputError,
    Instance,
    Policy,
    RequestMatrix,
    SolveResult,
    Violation,
    load_instance,
    save_instance,
    validate_instance,
)
from .matrix import FromFile, RandomRows, Uniform, Zipf, build_matrix, load_matrix, save_matrix, zipf_weights
from .costs import case_cost, expected_user_cost, service_cost, transmission_rate
from .solver import solve_bandwidth, solve_cache_compute, solve_joint
from .baselines import (
    CachingBaseline,
    InterestAwareCache,
    RandomCache,
    SchemeKind,
    UniformCache,
    ZipfCache,
    run_caching_baseline,
    run_scheme,
    with_cache_capacity,
)
from .harness import SimDefaults, SweepSpec, convergence_trace, run_sweep, sample_instance

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "ContentCatalog",
    "ConvergenceError",
    "CostWeights",
    "DeviceProfile",
    "InputError",
    "Instance",
    "Policy",
    "RequestMatrix",
    "SolveResult",
    "Violation",
    "load_instance",
    "save_instance",
    "validate_instance",
    "FromFile",
    "RandomRows",
    "Uniform",
    "Zipf",
    "build_matrix",
    "load_matrix",
    "save_matrix",
    "zipf_weights",
    "case_cost",
    "expected_user_cost",
    "service_cost",
    "transmission_rate",
    "solve_bandwidth",
    "solve_cache_compute",
    "solve_joint",
    "CachingBaseline",
    "InterestAwareCache",
    "RandomCache",
    "SchemeKind",
    "UniformCache",
    "ZipfCache",
    "run_caching_baseline",
    "run_scheme",
    "with_cache_capacity",
    "SimDefaults",
    "SweepSpec",
    "convergence_trace",
    "run_sweep",
    "sample_instance",
    "__version__",
]
