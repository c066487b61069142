"""End-to-end random-MDP experiment: oracle, AQI, VAQI, baselines and the report."""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from typing import Dict, Iterator

import numpy as np

from ..aqi import aqi, error_bound_report, greedy_and_evaluate, vaqi
from ..bellman import state_values_from_q, sup_distance
from ..config import SolverChoice
from ..conventional import api, ape, d_norm, ls_project
from ..features import build_features, build_random_ls_basis, build_test_matrix
from ..solvers import policy_evaluation_exact, policy_iteration, q_value_iteration
from .generator import GENERATOR_NAME, arbitrary_policy, random_mdp_from_rng
from .schemas import ApiSummary, ErrorBoundEntry, ExperimentConfig, ExperimentReport

logger = logging.getLogger(__name__)

ORDERING_SLACK_FACTOR = 2.0


@contextmanager
def _timed(runtime: Dict[str, float], stage: str) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    finally:
        runtime[stage] = time.perf_counter() - start


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """
    Run every configured solver on one seeded random MDP.

    The generator stream is consumed as: MDP, arbitrary policy, test matrix, least-squares
    basis. Q* comes from Q value iteration at ``oracle_tol`` and J* is its row-wise maximum.
    """
    rng = np.random.default_rng(config.seed)
    runtime: Dict[str, float] = {}
    curves: Dict[str, np.ndarray] = {}
    report_fields: Dict[str, dict] = {"bounds": {}, "iterations": {}, "traces": {}, "policies": {}, "soft_checks": {}}

    mdp = random_mdp_from_rng(rng, config.n, config.d, config.reward_range, config.alpha)
    u_arbt = arbitrary_policy(rng, config.n, config.d)
    basis = build_features(config.feature_spec(), mdp)
    w = build_test_matrix(config.test_matrix_spec(), basis, rng)
    logger.info(
        "Experiment set up",
        extra={"n": mdp.n, "d": mdp.d, "k": basis.k, "seed": config.seed, "w_columns": w.shape[1]},
    )

    with _timed(runtime, "exact"):
        q_star = q_value_iteration(mdp, config.oracle_tol, config.max_iter)
    j_star = state_values_from_q(q_star)
    curves["J_star"] = j_star

    if config.runs(SolverChoice.EXACT):
        with _timed(runtime, "policy_iteration"):
            u_star, j_pi = policy_iteration(mdp)
        report_fields["policies"]["u_star"] = u_star.tolist()
        report_fields["soft_checks"]["policy_iteration_agrees"] = bool(sup_distance(j_pi, j_star) <= 1e-7)

    for choice, label, test_matrix in ((SolverChoice.AQI, "EP", None), (SolverChoice.VAQI, "W", w)):
        if not config.runs(choice):
            continue
        with _timed(runtime, choice.value):
            if test_matrix is None:
                result = aqi(mdp, basis, config.tol, config.max_iter)
            else:
                result = vaqi(mdp, basis, test_matrix, config.tol, config.max_iter)
            policy, j_policy = greedy_and_evaluate(mdp, result.q_approx)
        bound = error_bound_report(mdp, basis, test_matrix, result, q_star)
        curves[f"J_tilde_{label}"] = result.value_approx
        curves[f"J_u_{label}"] = j_policy
        report_fields["bounds"][choice.value] = ErrorBoundEntry(**bound.to_dict())
        report_fields["iterations"][choice.value] = result.iterations
        report_fields["traces"][choice.value] = list(result.trace)
        report_fields["policies"][f"u_{label}"] = policy.tolist()

    with _timed(runtime, "arbitrary_policy"):
        curves["J_u_arbt"] = policy_evaluation_exact(mdp, u_arbt)
    report_fields["policies"]["u_arbt"] = u_arbt.tolist()

    api_summary = None
    if config.runs(SolverChoice.APE) or config.runs(SolverChoice.API):
        ls_basis = build_random_ls_basis(mdp.n, config.ls_k or config.k, rng)
        if config.runs(SolverChoice.APE):
            with _timed(runtime, "ape"):
                evaluation = ape(mdp, u_arbt, ls_basis, config.tol, config.max_iter)
            curves["J_tilde_APE"] = evaluation.value_approx
            D = evaluation.distribution
            j_arbt = curves["J_u_arbt"]
            ape_error = d_norm(j_arbt - evaluation.value_approx, D)
            projection_error = d_norm(j_arbt - ls_project(ls_basis, D, j_arbt), D)
            report_fields["soft_checks"]["ape_error_bound"] = bool(
                ape_error <= projection_error / np.sqrt(1.0 - mdp.alpha**2) + 1e-9 + config.tol
            )
            report_fields["iterations"]["ape"] = evaluation.iterations
        if config.runs(SolverChoice.API):
            with _timed(runtime, "api"):
                outcome = api(mdp, ls_basis, config.api_iters, config.tol, config.max_iter)
                curves["J_u_API"] = policy_evaluation_exact(mdp, outcome.final_policy)
            summary = outcome.to_dict()
            api_summary = ApiSummary(
                iterations=len(outcome.evaluations),
                chattering=outcome.chattering,
                converged=outcome.converged,
                cycle_start=outcome.cycle_start,
                policy_hashes=summary["policy_hashes"],
                evaluation_errors=summary["evaluation_errors"],
                performance_bound=outcome.performance_bound,
            )
            report_fields["policies"]["u_API"] = outcome.final_policy.tolist()

    if "J_tilde_EP" in curves:
        slack = ORDERING_SLACK_FACTOR * config.tol
        upper = bool(np.all(curves["J_tilde_EP"] >= j_star - slack))
        report_fields["soft_checks"]["J_tilde_EP_majorizes_J_star"] = upper
        if not upper:
            logger.warning(
                "J_tilde_EP falls below J* on some states",
                extra={"gap": float(np.max(j_star - curves["J_tilde_EP"]))},
            )

    errors = {name: sup_distance(j_star, values) for name, values in curves.items() if name != "J_star"}
    logger.info("Experiment finished", extra={"errors": errors, "seed": config.seed})
    return ExperimentReport(
        config=config,
        generator=GENERATOR_NAME,
        curves={name: [float(x) for x in values] for name, values in curves.items()},
        errors=errors,
        api=api_summary,
        runtime=runtime,
        **report_fields,
    )
