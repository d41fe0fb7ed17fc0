"""Information-criterion selection between unit-root and explosive AR(1) models.

The package simulates the four coefficient families (unit root and
three explosive parameterizations), estimates the coefficient by least
squares or its bias-corrected indirect variant, selects the order by
penalized likelihood comparison, evaluates the matching limit-theory
probabilities, and reproduces the Monte Carlo comparison tables.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .criteria import SelectionResult, choose_order, information_criterion, select
from .estimate import (
    BindingTable,
    FitResult,
    asymptotic_bias,
    binding_function,
    default_binding_table,
    explosive_kernel,
    indirect_fit,
    invert_binding,
    ols_fit,
    simulated_binding,
    stationary_kernel,
)
from .exceptions import (
    ConfigError,
    DegenerateSeriesError,
    ExcessDegeneracyError,
    IcxError,
    NonMonotoneTableError,
    PathOverflowError,
    QuadratureError,
    SaturationWarning,
)
from .experiment import (
    Cell,
    CellResult,
    ExperimentConfig,
    ExperimentReport,
    emit_report,
    parse_config,
    run_cell,
    run_experiment,
)
from .limits import (
    FunctionalDraw,
    LimitCase,
    chi_squared_cdf,
    indirect_local_functional,
    indirect_unit_root_functional,
    limit_probability,
    ols_local_functional,
    ols_unit_root_functional,
    penalty_ratio,
    sample_brownian_functionals,
    sample_ou_functionals,
)
from .model import (
    ErrorSpec,
    InitSpec,
    ModelSpec,
    PenaltySpec,
    parse_error,
    parse_init,
    parse_model,
    parse_penalty,
)
from .simulate import (
    SeriesSample,
    aligned_trajectories,
    draw_errors,
    generate_path,
    initial_value,
    path_batch,
)

__all__ = [
    "__version__",
    "BindingTable",
    "Cell",
    "CellResult",
    "ConfigError",
    "DegenerateSeriesError",
    "ErrorSpec",
    "ExcessDegeneracyError",
    "ExperimentConfig",
    "ExperimentReport",
    "FitResult",
    "FunctionalDraw",
    "IcxError",
    "InitSpec",
    "LimitCase",
    "ModelSpec",
    "NonMonotoneTableError",
    "PathOverflowError",
    "PenaltySpec",
    "QuadratureError",
    "SaturationWarning",
    "SelectionResult",
    "SeriesSample",
    "aligned_trajectories",
    "asymptotic_bias",
    "binding_function",
    "chi_squared_cdf",
    "choose_order",
    "default_binding_table",
    "draw_errors",
    "emit_report",
    "explosive_kernel",
    "generate_path",
    "indirect_fit",
    "indirect_local_functional",
    "indirect_unit_root_functional",
    "information_criterion",
    "initial_value",
    "invert_binding",
    "limit_probability",
    "ols_fit",
    "ols_local_functional",
    "ols_unit_root_functional",
    "parse_config",
    "parse_error",
    "parse_init",
    "parse_model",
    "parse_penalty",
    "path_batch",
    "penalty_ratio",
    "run_cell",
    "run_experiment",
    "sample_brownian_functionals",
    "sample_ou_functionals",
    "select",
    "simulated_binding",
    "stationary_kernel",
]
