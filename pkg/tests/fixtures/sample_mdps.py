"""Sample MDPs and feature matrices for testing."""

import math

# Two states, one action, unit rewards, uniform transitions, discount 0.9.
EXAMPLE_MDP = {
    "n": 2,
    "d": 1,
    "alpha": 0.9,
    "rewards": [[1.0], [1.0]],
    "transitions": [[[0.5, 0.5], [0.5, 0.5]]],
}

# J* = 5 / (1 - 0.5) = 10
SINGLE_STATE_MDP = {
    "n": 1,
    "d": 1,
    "alpha": 0.5,
    "rewards": [[5.0]],
    "transitions": [[[1.0]]],
}

# Action 1 pays 10, action 0 pays 1; both actions move identically.
DOMINANT_ACTION_MDP = {
    "n": 3,
    "d": 2,
    "alpha": 0.8,
    "rewards": [[1.0, 10.0], [1.0, 10.0], [1.0, 10.0]],
    "transitions": [
        [[0.2, 0.3, 0.5], [0.6, 0.2, 0.2], [0.1, 0.1, 0.8]],
        [[0.2, 0.3, 0.5], [0.6, 0.2, 0.2], [0.1, 0.1, 0.8]],
    ],
}

# Rewards 1 and 10 plus the boundary value 5.5 for two reward bins.
BOUNDARY_REWARDS_MDP = {
    "n": 2,
    "d": 2,
    "alpha": 0.9,
    "rewards": [[1.0, 10.0], [5.5, 1.0]],
    "transitions": [
        [[0.5, 0.5], [0.5, 0.5]],
        [[0.9, 0.1], [0.3, 0.7]],
    ],
}

# Bipartite chain: state 0 <-> {1, 2}; period 2, stationary (0.5, 0.25, 0.25).
PERIODIC_KERNEL = [
    [0.0, 0.5, 0.5],
    [1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
]

HAND_WRITTEN_FEATURES = [
    [0.0, "inf"],
    [1.0, 0.0],
    ["inf", 2.0],
    [0.5, 0.5],
]

ALL_INF_ROW_FEATURES = [
    [0.0, 1.0],
    ["inf", "inf"],
    [2.0, 0.0],
]

INF = math.inf
