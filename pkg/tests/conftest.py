"""Pytest configuration and shared fixtures."""

import logging
import os
import sys
from typing import Callable

import numpy as np
import pytest

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from tests.fixtures.sample_mdps import DOMINANT_ACTION_MDP, EXAMPLE_MDP, SINGLE_STATE_MDP
from tropical_adp.experiments import random_mdp
from tropical_adp.mdp import Mdp


@pytest.fixture
def example_mdp() -> Mdp:
    """Two-state, one-action MDP with unit rewards and uniform transitions."""
    return Mdp.from_dict(EXAMPLE_MDP)


@pytest.fixture
def single_state_mdp() -> Mdp:
    """One state, one action, g=5, alpha=0.5."""
    return Mdp.from_dict(SINGLE_STATE_MDP)


@pytest.fixture
def dominant_action_mdp() -> Mdp:
    """Three states where action 1 strictly dominates."""
    return Mdp.from_dict(DOMINANT_ACTION_MDP)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so every test sees the same draws."""
    return np.random.default_rng(20240607)


@pytest.fixture
def make_mdp() -> Callable[..., Mdp]:
    """Factory for seeded random MDPs."""

    def _make(n: int = 8, d: int = 3, alpha: float = 0.9, seed: int = 0, reward_range=(1, 10)) -> Mdp:
        return random_mdp(n, d, reward_range, seed, alpha)

    return _make


@pytest.fixture
def restore_root_logger():
    """Undo handler changes made by the CLI's logging setup."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def clean_env(monkeypatch):
    """Remove solver settings from the environment."""
    for name in (
        "TROPICAL_ADP_TOL",
        "TROPICAL_ADP_ORACLE_TOL",
        "TROPICAL_ADP_MAX_ITER",
        "TROPICAL_ADP_LOG_LEVEL",
        "TROPICAL_ADP_LOG_FORMAT",
        "LOG_LEVEL",
    ):
        monkeypatch.delenv(name, raising=False)
    return monkeypatch
