"""Random-MDP experiment harness."""

from .generator import GENERATOR_NAME, arbitrary_policy, random_mdp, random_mdp_from_rng
from .outputs import emit_outputs, load_report, write_json
from .runner import run_experiment
from .schemas import ExperimentConfig, ExperimentReport, build_config

__all__ = [
    "GENERATOR_NAME",
    "ExperimentConfig",
    "ExperimentReport",
    "arbitrary_policy",
    "build_config",
    "emit_outputs",
    "load_report",
    "random_mdp",
    "random_mdp_from_rng",
    "run_experiment",
    "write_json",
]
