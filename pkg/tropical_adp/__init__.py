"""Exact and min-plus approximate dynamic programming for finite discounted MDPs."""

from .aqi import (
    AqiResult,
    ErrorBoundReport,
    aqi,
    avi,
    best_sup_norm_weights,
    error_bound_report,
    greedy_and_evaluate,
    vaqi,
)
from .bellman import bellman_H, bellman_T, bellman_T_u, greedy_from_q, greedy_policy
from .config import FeatureSpec, InfinitySpec, SolverChoice, SolverSettings, TestMatrixSpec
from .conventional import ApeResult, ApiResult, LsBasis, api, ape, d_norm, ls_project
from .errors import (
    ConvergenceError,
    FeatureLoadError,
    InvalidArgumentError,
    InvariantViolationError,
    NumericError,
    OutputError,
    ProjectionUndefinedError,
    RankDeficiencyError,
    TropicalAdpError,
)
from .features import build_full_basis, build_reward_bins, build_test_matrix, load_features
from .mdp import Mdp
from .minplus import SpanBasis, mp_dot, mp_mat_mat, mp_mat_vec, project, project_variational, residuate
from .solvers import (
    policy_evaluation_exact,
    policy_iteration,
    q_value_iteration,
    stationary_distribution,
    value_iteration,
)

__all__ = [
    "AqiResult",
    "ApeResult",
    "ApiResult",
    "ConvergenceError",
    "ErrorBoundReport",
    "FeatureLoadError",
    "FeatureSpec",
    "InfinitySpec",
    "InvalidArgumentError",
    "InvariantViolationError",
    "LsBasis",
    "Mdp",
    "NumericError",
    "OutputError",
    "ProjectionUndefinedError",
    "RankDeficiencyError",
    "SolverChoice",
    "SolverSettings",
    "SpanBasis",
    "TestMatrixSpec",
    "TropicalAdpError",
    "api",
    "ape",
    "aqi",
    "avi",
    "bellman_H",
    "bellman_T",
    "bellman_T_u",
    "best_sup_norm_weights",
    "build_full_basis",
    "build_reward_bins",
    "build_test_matrix",
    "d_norm",
    "error_bound_report",
    "greedy_and_evaluate",
    "greedy_from_q",
    "greedy_policy",
    "load_features",
    "ls_project",
    "mp_dot",
    "mp_mat_mat",
    "mp_mat_vec",
    "policy_evaluation_exact",
    "policy_iteration",
    "project",
    "project_variational",
    "q_value_iteration",
    "residuate",
    "stationary_distribution",
    "value_iteration",
    "vaqi",
]
