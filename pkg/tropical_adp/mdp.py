"""Finite discounted-reward MDP model and its JSON representation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidArgumentError, OutputError

# Dense tables; see the module docstrings of bellman/solvers for shapes.
Policy = NDArray[np.int64]  # (n,) action index per state
ValueFunction = NDArray[np.float64]  # (n,)
QFunction = NDArray[np.float64]  # (n, d); flattened index s*d + a

ROW_SUM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class Mdp:
    """
    A finite MDP with ``n`` states, ``d`` actions and discount ``alpha``.

    ``rewards[s, a]`` is the one-step reward g_a(s) and ``transitions[a, s, s']`` the
    probability of moving from ``s`` to ``s'`` under action ``a``. Arrays are copied,
    validated and made read-only on construction.
    """

    rewards: NDArray[np.float64]
    transitions: NDArray[np.float64]
    discount: float

    def __post_init__(self) -> None:
        rewards = np.array(self.rewards, dtype=float)
        transitions = np.array(self.transitions, dtype=float)

        if rewards.ndim != 2 or rewards.shape[0] < 1 or rewards.shape[1] < 1:
            raise InvalidArgumentError(f"rewards must be a non-empty n×d table, got shape {rewards.shape}")
        n, d = rewards.shape
        if transitions.shape != (d, n, n):
            raise InvalidArgumentError(
                f"transitions must have shape (d, n, n) = {(d, n, n)}, got {transitions.shape}"
            )
        if not np.all(np.isfinite(rewards)):
            raise InvalidArgumentError("all reward entries must be finite")
        if not np.all(np.isfinite(transitions)) or np.any(transitions < 0):
            raise InvalidArgumentError("transition probabilities must be finite and nonnegative")
        row_error = np.abs(transitions.sum(axis=2) - 1.0)
        if np.any(row_error > ROW_SUM_TOLERANCE):
            a, s = np.unravel_index(int(np.argmax(row_error)), row_error.shape)
            raise InvalidArgumentError(
                f"transition row (action={a}, state={s}) sums to {transitions[a, s].sum()!r}, expected 1"
            )
        discount = float(self.discount)
        if not 0.0 <= discount < 1.0:
            raise InvalidArgumentError(f"discount must lie in [0, 1), got {discount}")

        rewards.setflags(write=False)
        transitions.setflags(write=False)
        object.__setattr__(self, "rewards", rewards)
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "discount", discount)

    @property
    def n(self) -> int:
        return self.rewards.shape[0]

    @property
    def d(self) -> int:
        return self.rewards.shape[1]

    @property
    def alpha(self) -> float:
        return self.discount

    def policy_kernel(self, policy: ArrayLike) -> NDArray[np.float64]:
        """Return the n×n transition matrix P_u of a deterministic policy."""
        u = validate_policy(self, policy)
        return self.transitions[u, np.arange(self.n), :]

    def policy_rewards(self, policy: ArrayLike) -> NDArray[np.float64]:
        """Return the reward vector g_u."""
        u = validate_policy(self, policy)
        return self.rewards[np.arange(self.n), u]

    def to_dict(self) -> Dict[str, Any]:
        """Convert to the documented JSON document layout."""
        return {
            "n": self.n,
            "d": self.d,
            "alpha": self.discount,
            "rewards": self.rewards.tolist(),
            "transitions": self.transitions.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Mdp":
        """Create from a JSON document, checking the declared sizes."""
        try:
            rewards = np.asarray(data["rewards"], dtype=float)
            transitions = np.asarray(data["transitions"], dtype=float)
            alpha = float(data["alpha"])
        except KeyError as exc:
            raise InvalidArgumentError(f"MDP document is missing field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"MDP document has malformed arrays: {exc}") from exc

        declared = (data.get("n"), data.get("d"))
        if declared != (None, None) and rewards.ndim == 2 and declared != rewards.shape:
            raise InvalidArgumentError(f"declared size (n, d) = {declared} does not match rewards {rewards.shape}")
        return cls(rewards=rewards, transitions=transitions, discount=alpha)

    def save(self, file_path: Union[str, Path]) -> None:
        """Save the MDP to a JSON file."""
        path = Path(file_path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                json.dump(self.to_dict(), f)
        except OSError as exc:
            raise OutputError(f"Cannot write MDP to {path}: {exc}", path=str(path)) from exc

    @classmethod
    def load(cls, file_path: Union[str, Path]) -> "Mdp":
        """Load an MDP from a JSON file."""
        path = Path(file_path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except OSError as exc:
            raise OutputError(f"Cannot read MDP from {path}: {exc}", path=str(path)) from exc
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"{path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def validate_policy(mdp: Mdp, policy: ArrayLike) -> Policy:
    """Return ``policy`` as an int array after checking its length and action range."""
    u = np.asarray(policy)
    if u.shape != (mdp.n,):
        raise InvalidArgumentError(f"policy must have length {mdp.n}, got shape {u.shape}")
    if u.size and (not np.issubdtype(u.dtype, np.integer) or u.min() < 0 or u.max() >= mdp.d):
        raise InvalidArgumentError(f"policy entries must be action indices in [0, {mdp.d})")
    return u.astype(np.int64, copy=False)


def validate_value(mdp: Mdp, values: ArrayLike) -> ValueFunction:
    """Return ``values`` as a float vector of length n with finite entries."""
    J = np.asarray(values, dtype=float)
    if J.shape != (mdp.n,):
        raise InvalidArgumentError(f"value function must have length {mdp.n}, got shape {J.shape}")
    if not np.all(np.isfinite(J)):
        raise InvalidArgumentError("value function entries must be finite")
    return J


def validate_q(mdp: Mdp, q: ArrayLike) -> QFunction:
    """Return ``q`` as an n×d float table with finite entries."""
    Q = np.asarray(q, dtype=float)
    if Q.shape != (mdp.n, mdp.d):
        raise InvalidArgumentError(f"Q function must have shape {(mdp.n, mdp.d)}, got {Q.shape}")
    if not np.all(np.isfinite(Q)):
        raise InvalidArgumentError("Q function entries must be finite")
    return Q


def flatten_q(q: ArrayLike) -> NDArray[np.float64]:
    """Flatten an n×d table so that entry (s, a) lands at index s*d + a."""
    return np.asarray(q, dtype=float).reshape(-1)


def unflatten_q(vector: ArrayLike, d: int) -> QFunction:
    """Inverse of :func:`flatten_q`."""
    flat = np.asarray(vector, dtype=float)
    if flat.ndim != 1 or flat.size % d:
        raise InvalidArgumentError(f"cannot reshape vector of shape {flat.shape} into rows of {d} actions")
    return flat.reshape(-1, d)
