"""Bellman operators T, T_u and H together with greedy policy extraction.

All operators act on dense arrays: value functions of shape ``(n,)`` and Q functions of
shape ``(n, d)``. Ties in every argmax are broken toward the lowest action index.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidArgumentError
from .mdp import Mdp, Policy, QFunction, ValueFunction, validate_policy, validate_q, validate_value


def lookahead(mdp: Mdp, J: ArrayLike) -> QFunction:
    """One-step lookahead table ``g_a(s) + α Σ_s' P_a(s, s') J(s')`` of shape (n, d)."""
    values = validate_value(mdp, J)
    expected = mdp.transitions @ values  # (d, n)
    return mdp.rewards + mdp.alpha * expected.T


def bellman_T(mdp: Mdp, J: ArrayLike) -> ValueFunction:
    """Optimal Bellman operator ``(TJ)(s) = max_a [g_a(s) + α P_a J (s)]``."""
    return lookahead(mdp, J).max(axis=1)


def bellman_T_u(mdp: Mdp, u: ArrayLike, J: ArrayLike) -> ValueFunction:
    """Policy Bellman operator ``(T_u J)(s) = g_{u(s)}(s) + α P_{u(s)} J (s)``."""
    policy = validate_policy(mdp, u)
    values = validate_value(mdp, J)
    return mdp.policy_rewards(policy) + mdp.alpha * (mdp.policy_kernel(policy) @ values)


def bellman_H(mdp: Mdp, Q: ArrayLike) -> QFunction:
    """Q-Bellman operator ``(HQ)(s, a) = g_a(s) + α Σ_s' P_a(s, s') max_a' Q(s', a')``."""
    table = validate_q(mdp, Q)
    return lookahead(mdp, table.max(axis=1))


def greedy_policy(mdp: Mdp, J: ArrayLike) -> Policy:
    """Greedy policy with respect to a value function."""
    return np.argmax(lookahead(mdp, J), axis=1).astype(np.int64)


def greedy_from_q(Q: ArrayLike) -> Policy:
    """Row-wise argmax of a Q table."""
    table = np.asarray(Q, dtype=float)
    if table.ndim != 2 or table.shape[1] < 1:
        raise InvalidArgumentError(f"Q must be an n×d table, got shape {table.shape}")
    return np.argmax(table, axis=1).astype(np.int64)


def sup_norm(x: ArrayLike) -> float:
    """Max-norm ``‖x‖∞`` (0 for empty input)."""
    arr = np.asarray(x, dtype=float)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def sup_distance(x: ArrayLike, y: ArrayLike) -> float:
    return sup_norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))


def state_values_from_q(Q: ArrayLike) -> NDArray[np.float64]:
    """``J(s) = max_a Q(s, a)``."""
    return np.asarray(Q, dtype=float).max(axis=1)
