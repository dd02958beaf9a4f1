"""Sparse linear regression by greedy zero-norm search warm-started from the lasso."""

from ._kernels import BACKEND_NAME as backend
from .data import (
    SyntheticInstance,
    SyntheticSpec,
    generate_orthogonal,
    generate_synthetic,
    inject_collinear,
    load_csv,
)
from .evaluate import (
    ComparisonReport,
    FoldPlan,
    FoldRecord,
    hamming_support,
    nrmse,
    run_accuracy_comparison,
    run_support_recovery,
    select_lambda,
)
from .lass0 import (
    Lass0Config,
    PipelineResult,
    StepTrace,
    improving_step,
    l0_objective,
    lass0_fit,
    lass0_pipeline,
    pipeline_solutions,
)
from .lasso import (
    LambdaGrid,
    LassoConfig,
    default_grid,
    fit_lasso,
    kkt_violation,
    lasso_path,
    soft_threshold,
)
from .linalg import (
    FactorState,
    SolverConfig,
    factor_state,
    gram_update,
    residual_loss,
    restricted_ols,
)
from .oracle import OracleResult, exhaustive_l0, hard_threshold_oracle, soft_threshold_oracle
from .types import SparseSolution, SupportSet

__version__ = "0.1.0"

__all__ = [
    "backend",
    "SupportSet",
    "SparseSolution",
    "SolverConfig",
    "FactorState",
    "factor_state",
    "gram_update",
    "restricted_ols",
    "residual_loss",
    "LassoConfig",
    "LambdaGrid",
    "soft_threshold",
    "fit_lasso",
    "lasso_path",
    "default_grid",
    "kkt_violation",
    "Lass0Config",
    "StepTrace",
    "PipelineResult",
    "l0_objective",
    "lass0_fit",
    "lass0_pipeline",
    "pipeline_solutions",
    "improving_step",
    "OracleResult",
    "exhaustive_l0",
    "hard_threshold_oracle",
    "soft_threshold_oracle",
    "SyntheticSpec",
    "SyntheticInstance",
    "generate_synthetic",
    "generate_orthogonal",
    "inject_collinear",
    "load_csv",
    "FoldPlan",
    "FoldRecord",
    "ComparisonReport",
    "hamming_support",
    "nrmse",
    "select_lambda",
    "run_support_recovery",
    "run_accuracy_comparison",
]
