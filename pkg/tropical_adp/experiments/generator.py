"""Seeded random MDP generation.

One ``numpy.random.Generator`` (PCG64) per run, consumed in a fixed order: rewards, then
transition rows, then the arbitrary policy, then anything the caller draws afterwards.
Changing the order changes every downstream result.
"""

from __future__ import annotations

import logging
from typing import Tuple

import numpy as np

from ..errors import InvalidArgumentError
from ..mdp import Mdp, Policy

logger = logging.getLogger(__name__)

GENERATOR_NAME = "numpy.random.PCG64"


def random_mdp_from_rng(
    rng: np.random.Generator,
    n: int,
    d: int,
    reward_range: Tuple[int, int] = (1, 10),
    alpha: float = 0.9,
) -> Mdp:
    """
    Draw integer rewards uniformly from ``reward_range`` (inclusive) and dense transition rows.

    Each row of each P_a is a vector of uniform(0, 1] weights normalized to sum to 1, so every
    policy induces an irreducible aperiodic chain.
    """
    if n < 1 or d < 1:
        raise InvalidArgumentError(f"n and d must be >= 1, got n={n}, d={d}")
    low, high = int(reward_range[0]), int(reward_range[1])
    if low > high:
        raise InvalidArgumentError(f"reward range [{low}, {high}] is empty")

    rewards = rng.integers(low, high + 1, size=(n, d)).astype(float)
    weights = 1.0 - rng.random((d, n, n))
    transitions = weights / weights.sum(axis=2, keepdims=True)
    logger.debug("Generated random MDP", extra={"n": n, "d": d, "alpha": alpha})
    return Mdp(rewards=rewards, transitions=transitions, discount=alpha)


def random_mdp(
    n: int,
    d: int,
    reward_range: Tuple[int, int] = (1, 10),
    seed: int = 0,
    alpha: float = 0.9,
) -> Mdp:
    """Random MDP fully determined by ``seed``."""
    return random_mdp_from_rng(np.random.default_rng(seed), n, d, reward_range, alpha)


def arbitrary_policy(rng: np.random.Generator, n: int, d: int) -> Policy:
    """A fixed, seeded-random action per state."""
    return rng.integers(0, d, size=n).astype(np.int64)
