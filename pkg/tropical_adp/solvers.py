"""Exact dynamic-programming solvers used as oracles for the approximate schemes."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .bellman import bellman_H, bellman_T, bellman_T_u, greedy_policy, lookahead, sup_distance
from .errors import ConvergenceError, InvalidArgumentError, NumericError
from .mdp import Mdp, Policy, QFunction, ValueFunction, validate_policy, validate_q, validate_value

logger = logging.getLogger(__name__)

STATIONARY_RESIDUAL_TOLERANCE = 1e-10


@dataclass
class FixedPointResult:
    """Outcome of a successful sup-norm fixed-point iteration."""

    value: NDArray[np.float64]
    iterations: int
    residual: float
    trace: List[float] = field(default_factory=list)


def fixed_point_iteration(
    operator: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    initial: NDArray[np.float64],
    *,
    threshold: float,
    max_iter: int,
    name: str,
    distance: Callable[[ArrayLike, ArrayLike], float] = sup_distance,
) -> FixedPointResult:
    """
    Iterate ``x_{n+1} = operator(x_n)`` until ``distance(x_{n+1}, x_n) <= threshold``.

    Args:
        operator: The map to iterate; must return a fresh array.
        initial: Starting point x_0.
        threshold: Stopping level for the successive-difference residual.
        max_iter: Maximum number of operator applications.
        name: Solver name used in log records and error messages.
        distance: Residual metric, the sup norm unless stated otherwise.

    Returns:
        The last iterate x_{n+1}, the number of applications and the residual trace.

    Raises:
        ConvergenceError: ``max_iter`` applications without meeting the threshold.
    """
    if max_iter < 1:
        raise InvalidArgumentError(f"max_iter must be >= 1, got {max_iter}")
    current = np.asarray(initial, dtype=float)
    trace: List[float] = []
    for iteration in range(1, max_iter + 1):
        updated = operator(current)
        residual = float(distance(updated, current))
        trace.append(residual)
        logger.debug("Fixed-point sweep", extra={"solver": name, "iteration": iteration, "residual": residual})
        if residual <= threshold:
            logger.info(
                "Fixed-point iteration converged",
                extra={"solver": name, "iterations": iteration, "residual": residual},
            )
            return FixedPointResult(value=updated, iterations=iteration, residual=residual, trace=trace)
        current = updated
    raise ConvergenceError(
        f"{name} did not converge within {max_iter} iterations (residual {trace[-1]:.3e} > {threshold:.3e})",
        last_iterate=current,
        residual=trace[-1],
        trace=trace,
    )


def value_stopping_threshold(alpha: float, tol: float) -> float:
    """
    Residual level ``tol·(1−α)/(2α)`` at which the last Bellman iterate lies within tol of the
    fixed point. Infinite when α = 0, where a single sweep is exact.
    """
    if tol <= 0:
        raise InvalidArgumentError(f"tol must be > 0, got {tol}")
    if alpha == 0.0:
        return math.inf
    return tol * (1.0 - alpha) / (2.0 * alpha)


def value_iteration(
    mdp: Mdp,
    tol: float = 1e-10,
    max_iter: int = 10000,
    *,
    initial: Optional[ArrayLike] = None,
) -> ValueFunction:
    """Iterate ``J_{n+1} = T J_n`` from ``initial`` (zero by default) until within ``tol`` of J*."""
    start = np.zeros(mdp.n) if initial is None else validate_value(mdp, initial)
    result = fixed_point_iteration(
        lambda J: bellman_T(mdp, J),
        start,
        threshold=value_stopping_threshold(mdp.alpha, tol),
        max_iter=max_iter,
        name="value_iteration",
    )
    return result.value


def q_value_iteration(
    mdp: Mdp,
    tol: float = 1e-10,
    max_iter: int = 10000,
    *,
    initial: Optional[ArrayLike] = None,
) -> QFunction:
    """Iterate ``Q_{n+1} = H Q_n`` from ``initial`` (zero by default) until within ``tol`` of Q*."""
    start = np.zeros((mdp.n, mdp.d)) if initial is None else validate_q(mdp, initial)
    result = fixed_point_iteration(
        lambda Q: bellman_H(mdp, Q),
        start,
        threshold=value_stopping_threshold(mdp.alpha, tol),
        max_iter=max_iter,
        name="q_value_iteration",
    )
    return result.value


def policy_evaluation_exact(mdp: Mdp, u: ArrayLike) -> ValueFunction:
    """Solve ``(I − α P_u) J = g_u`` with a dense linear solve."""
    policy = validate_policy(mdp, u)
    system = np.eye(mdp.n) - mdp.alpha * mdp.policy_kernel(policy)
    rhs = mdp.policy_rewards(policy)
    try:
        J = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"policy evaluation solve failed: {exc}") from exc

    residual = sup_distance(J, bellman_T_u(mdp, policy, J))
    if not np.isfinite(residual) or residual > 1e-10 * (1.0 + float(np.max(np.abs(J)))):
        raise NumericError(f"policy evaluation residual {residual:.3e} exceeds tolerance")
    return J


def policy_iteration(mdp: Mdp, *, max_iter: Optional[int] = None) -> Tuple[Policy, ValueFunction]:
    """
    Howard policy iteration starting from the greedy policy of the zero value function.

    The improvement step is greedy with respect to J_{u_i}; the incumbent action is kept when
    it is within ``1e-12·(1+|max|)`` of the best one so floating-point ties cannot cycle.
    Terminates when the policy is unchanged for one iteration.
    """
    cap = max_iter if max_iter is not None else 10 * mdp.n
    policy = greedy_policy(mdp, np.zeros(mdp.n))
    states = np.arange(mdp.n)
    values = policy_evaluation_exact(mdp, policy)
    for iteration in range(1, cap + 1):
        table = lookahead(mdp, values)
        best = table.max(axis=1)
        incumbent = table[states, policy]
        keep = incumbent >= best - 1e-12 * (1.0 + np.abs(best))
        improved = np.where(keep, policy, np.argmax(table, axis=1)).astype(np.int64)
        if np.array_equal(improved, policy):
            logger.info("Policy iteration converged", extra={"solver": "policy_iteration", "iterations": iteration})
            return policy, values
        logger.debug(
            "Policy improved",
            extra={"solver": "policy_iteration", "iteration": iteration, "changed_states": int(np.sum(~keep))},
        )
        policy = improved
        values = policy_evaluation_exact(mdp, policy)
    raise ConvergenceError(
        f"policy_iteration exceeded {cap} iterations",
        last_iterate=(policy, values),
        residual=sup_distance(values, bellman_T(mdp, values)),
    )


def markov_stationary(
    kernel: ArrayLike,
    *,
    regularization: float = 0.0,
    tol: float = 1e-13,
    max_iter: int = 100_000,
) -> NDArray[np.float64]:
    """
    Stationary distribution of a row-stochastic matrix by power iteration from uniform.

    With ``regularization`` λ > 0 the chain ``(1−λ)P + λ·uniform`` is used instead, which is
    irreducible and aperiodic for any P.
    """
    P = np.asarray(kernel, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise InvalidArgumentError(f"kernel must be square, got shape {P.shape}")
    if not 0.0 <= regularization <= 1.0:
        raise InvalidArgumentError(f"regularization must lie in [0, 1], got {regularization}")
    n = P.shape[0]
    if regularization > 0.0:
        P = (1.0 - regularization) * P + regularization / n

    pi = np.full(n, 1.0 / n)
    for it in range(max_iter):
        pi_new = pi @ P
        if it % 10 == 0 and np.max(np.abs(pi_new - pi)) < tol:
            break
        pi = pi_new
    else:
        raise NumericError(
            "power iteration for the stationary distribution did not converge; "
            "the chain may be periodic or reducible, retry with regularization > 0"
        )

    pi_new = np.clip(pi_new, 0.0, None)
    pi_new = pi_new / pi_new.sum()
    residual = float(np.max(np.abs(pi_new @ P - pi_new)))
    if residual > STATIONARY_RESIDUAL_TOLERANCE:
        raise NumericError(
            f"stationary residual {residual:.3e} exceeds {STATIONARY_RESIDUAL_TOLERANCE:g}; "
            "retry with regularization > 0"
        )
    return pi_new


def stationary_distribution(
    mdp: Mdp,
    u: ArrayLike,
    *,
    regularization: float = 0.0,
    tol: float = 1e-13,
    max_iter: int = 100_000,
) -> NDArray[np.float64]:
    """Stationary distribution π of the chain P_u (``π^T P_u = π^T``, ``Σπ = 1``)."""
    return markov_stationary(mdp.policy_kernel(u), regularization=regularization, tol=tol, max_iter=max_iter)
