"""Pydantic models for experiment configuration and reports."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from ..config import FeatureKind, FeatureSpec, InfinitySpec, SolverChoice, TestMatrixSpec
from ..errors import InvalidArgumentError


class ExperimentConfig(BaseModel):
    """Parameters of one random-MDP experiment. Defaults match the 100-state study."""

    n: int = Field(default=100, ge=1, description="Number of states")
    d: int = Field(default=5, ge=1, description="Number of actions")
    alpha: float = Field(default=0.9, ge=0.0, lt=1.0, description="Discount factor")
    reward_range: Tuple[int, int] = Field(default=(1, 10), description="Inclusive integer reward range")
    k: int = Field(default=5, ge=1, description="Number of reward bins")
    features: Optional[str] = Field(default=None, description="bins:K | full | file:PATH; defaults to bins:k")
    seed: int = Field(default=0, ge=0, lt=2**64)
    solvers: List[str] = Field(default_factory=lambda: ["exact", "aqi", "vaqi"])
    w: str = Field(default="random", description="identity | features | random[:M[:DENSITY]]")
    infinity: str = Field(default="sentinel:1000", description="exact | sentinel[:VALUE]")
    tol: float = Field(default=1e-8, gt=0.0)
    oracle_tol: float = Field(default=1e-10, gt=0.0)
    max_iter: int = Field(default=10000, ge=1)
    api_iters: int = Field(default=20, ge=1)
    ls_k: Optional[int] = Field(default=None, ge=1, description="Conventional basis size; defaults to k")

    @field_validator("solvers", mode="before")
    @classmethod
    def parse_solvers(cls, value: Any) -> List[str]:
        """Accept a comma-separated string or a list; canonicalize aliases and drop repeats."""
        items = value.split(",") if isinstance(value, str) else list(value)
        canonical: List[str] = []
        for item in items:
            choice = SolverChoice.from_string(str(item)).value
            if choice not in canonical:
                canonical.append(choice)
        if not canonical:
            raise ValueError("at least one solver is required")
        return canonical

    @field_validator("w")
    @classmethod
    def parse_w(cls, value: str) -> str:
        return str(TestMatrixSpec.from_string(value))

    @field_validator("infinity")
    @classmethod
    def parse_infinity(cls, value: str) -> str:
        return str(InfinitySpec.from_string(value))

    @field_validator("features")
    @classmethod
    def parse_features(cls, value: Optional[str]) -> Optional[str]:
        return None if value is None else str(FeatureSpec.from_string(value))

    @model_validator(mode="after")
    def check_ranges(self) -> "ExperimentConfig":
        low, high = self.reward_range
        if low > high:
            raise ValueError(f"reward range [{low}, {high}] is empty")
        ls_k = self.ls_k if self.ls_k is not None else self.k
        if ls_k > self.n and any(s in self.solvers for s in ("ape", "api")):
            raise ValueError(f"conventional basis size {ls_k} exceeds n={self.n}")
        return self

    def infinity_spec(self) -> InfinitySpec:
        return InfinitySpec.from_string(self.infinity)

    def test_matrix_spec(self) -> TestMatrixSpec:
        return TestMatrixSpec.from_string(self.w)

    def feature_spec(self) -> FeatureSpec:
        if self.features is None:
            return FeatureSpec(FeatureKind.REWARD_BINS, k=self.k, infinity=self.infinity_spec())
        return FeatureSpec.from_string(self.features, infinity=self.infinity_spec())

    def runs(self, solver: Union[str, SolverChoice]) -> bool:
        return SolverChoice(solver).value in self.solvers

    @classmethod
    def from_file(cls, path: Union[str, Path], **overrides: Any) -> "ExperimentConfig":
        """Load a JSON config; non-None ``overrides`` replace file values."""
        file_path = Path(path)
        try:
            data = json.loads(file_path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise InvalidArgumentError(f"Cannot read config {file_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"{file_path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidArgumentError(f"{file_path} must contain a JSON object")
        data.update({key: value for key, value in overrides.items() if value is not None})
        return build_config(**data)


def build_config(**values: Any) -> ExperimentConfig:
    """Validate keyword values into a config, mapping validation failures to InvalidArgumentError."""
    try:
        return ExperimentConfig(**values)
    except ValidationError as exc:
        raise InvalidArgumentError(f"Invalid experiment config: {exc}") from exc


class ErrorBoundEntry(BaseModel):
    epsilon: float
    beta: float
    bound: float
    statement_bound: float
    measured: float
    slack: float = 0.0


class ApiSummary(BaseModel):
    """Outcome of approximate policy iteration on the conventional basis."""

    iterations: int
    chattering: bool
    converged: bool
    cycle_start: Optional[int] = None
    policy_hashes: List[str]
    evaluation_errors: List[float]
    performance_bound: float


class ExperimentReport(BaseModel):
    """
    Curves, sup-norm errors and diagnostics of one experiment.

    ``curves`` maps curve names (``J_star``, ``J_tilde_EP``, ...) to per-state values and
    ``errors`` maps every non-oracle curve to ``‖J* − curve‖∞``. ``runtime`` holds wall-clock
    seconds per stage and is the only field that varies between identical runs.
    """

    config: ExperimentConfig
    generator: str
    curves: Dict[str, List[float]]
    errors: Dict[str, float]
    bounds: Dict[str, ErrorBoundEntry] = Field(default_factory=dict)
    iterations: Dict[str, int] = Field(default_factory=dict)
    traces: Dict[str, List[float]] = Field(default_factory=dict)
    policies: Dict[str, List[int]] = Field(default_factory=dict)
    api: Optional[ApiSummary] = None
    soft_checks: Dict[str, bool] = Field(default_factory=dict)
    runtime: Dict[str, float] = Field(default_factory=dict)

    @field_validator("errors")
    @classmethod
    def check_errors(cls, value: Dict[str, float]) -> Dict[str, float]:
        negative = [name for name, error in value.items() if error < 0]
        if negative:
            raise ValueError(f"sup-norm errors must be nonnegative: {negative}")
        return value

    def deterministic_dict(self) -> Dict[str, Any]:
        """Report content without runtime measurements."""
        return self.model_dump(mode="json", exclude={"runtime"})
