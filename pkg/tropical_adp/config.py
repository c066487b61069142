"""Configuration objects for solvers, features and the experiment harness."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Optional, Set

DEFAULT_SENTINEL = 1000.0


class SolverChoice(str, Enum):
    """Solvers the experiment harness can run."""

    EXACT = "exact"
    AQI = "aqi"
    VAQI = "vaqi"
    APE = "ape"
    API = "api"

    @classmethod
    def from_string(cls, value: str) -> "SolverChoice":
        """Parse user-provided identifiers and return the canonical choice."""
        normalized = value.strip().lower()
        try:
            return _SOLVER_CHOICE_ALIASES[normalized]
        except KeyError as exc:
            raise ValueError(f"Unsupported solver: {value}") from exc

    @property
    def aliases(self) -> Set[str]:
        """Return every identifier that maps to this solver."""
        return {alias for alias, choice in _SOLVER_CHOICE_ALIASES.items() if choice is self}


_SOLVER_CHOICE_ALIASES: Dict[str, SolverChoice] = {
    SolverChoice.EXACT.value: SolverChoice.EXACT,
    "oracle": SolverChoice.EXACT,
    "qvi": SolverChoice.EXACT,
    SolverChoice.AQI.value: SolverChoice.AQI,
    "ep": SolverChoice.AQI,
    SolverChoice.VAQI.value: SolverChoice.VAQI,
    "w": SolverChoice.VAQI,
    SolverChoice.APE.value: SolverChoice.APE,
    SolverChoice.API.value: SolverChoice.API,
}


class InfinityKind(str, Enum):
    EXACT = "exact"
    SENTINEL = "sentinel"


@dataclass(frozen=True)
class InfinitySpec:
    """How +∞ is represented inside a min-plus feature matrix."""

    kind: InfinityKind = InfinityKind.EXACT
    sentinel: float = DEFAULT_SENTINEL

    def __post_init__(self) -> None:
        if not (self.sentinel > 0 and math.isfinite(self.sentinel)):
            raise ValueError(f"Sentinel value must be a positive finite number, got {self.sentinel}")

    @property
    def value(self) -> float:
        """The number stored in place of +∞."""
        return math.inf if self.kind is InfinityKind.EXACT else self.sentinel

    @classmethod
    def from_string(cls, value: str) -> "InfinitySpec":
        """Parse ``exact``, ``sentinel`` or ``sentinel:VALUE``."""
        head, _, tail = value.strip().lower().partition(":")
        if head in ("exact", "inf", "exact_inf"):
            if tail:
                raise ValueError(f"Unexpected argument for exact infinity: {value}")
            return cls(InfinityKind.EXACT)
        if head == "sentinel":
            try:
                sentinel = float(tail) if tail else DEFAULT_SENTINEL
            except ValueError as exc:
                raise ValueError(f"Invalid sentinel value: {value}") from exc
            return cls(InfinityKind.SENTINEL, sentinel)
        raise ValueError(f"Unsupported infinity mode: {value}")

    def __str__(self) -> str:
        if self.kind is InfinityKind.EXACT:
            return "exact"
        return f"sentinel:{self.sentinel:g}"


class FeatureKind(str, Enum):
    REWARD_BINS = "reward_bins"
    FULL_BASIS = "full_basis"
    CUSTOM_FILE = "custom_file"


_FEATURE_KIND_ALIASES: Dict[str, FeatureKind] = {
    "bins": FeatureKind.REWARD_BINS,
    "reward_bins": FeatureKind.REWARD_BINS,
    "full": FeatureKind.FULL_BASIS,
    "full_basis": FeatureKind.FULL_BASIS,
    "identity": FeatureKind.FULL_BASIS,
    "file": FeatureKind.CUSTOM_FILE,
    "custom_file": FeatureKind.CUSTOM_FILE,
}


@dataclass(frozen=True)
class FeatureSpec:
    """Which min-plus basis to build."""

    kind: FeatureKind = FeatureKind.REWARD_BINS
    k: int = 5
    path: Optional[Path] = None
    infinity: InfinitySpec = InfinitySpec()

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"Feature count k must be >= 1, got {self.k}")
        if self.kind is FeatureKind.CUSTOM_FILE and self.path is None:
            raise ValueError("custom_file features require a path")

    @classmethod
    def from_string(cls, value: str, *, infinity: Optional[InfinitySpec] = None) -> "FeatureSpec":
        """Parse ``bins:K``, ``full`` or ``file:PATH``."""
        head, _, tail = value.strip().partition(":")
        try:
            kind = _FEATURE_KIND_ALIASES[head.lower()]
        except KeyError as exc:
            raise ValueError(f"Unsupported feature kind: {value}") from exc
        inf = infinity or InfinitySpec()
        if kind is FeatureKind.REWARD_BINS:
            try:
                k = int(tail) if tail else 5
            except ValueError as exc:
                raise ValueError(f"Invalid bin count in {value}") from exc
            return cls(kind, k=k, infinity=inf)
        if kind is FeatureKind.CUSTOM_FILE:
            if not tail:
                raise ValueError("file features need a path, e.g. file:features.json")
            return cls(kind, path=Path(tail), infinity=inf)
        return cls(kind, infinity=inf)

    def __str__(self) -> str:
        if self.kind is FeatureKind.REWARD_BINS:
            return f"bins:{self.k}"
        if self.kind is FeatureKind.CUSTOM_FILE:
            return f"file:{self.path}"
        return "full"


class TestMatrixKind(str, Enum):
    __test__ = False

    IDENTITY = "identity"
    FEATURES = "features"
    RANDOM = "random"


@dataclass(frozen=True)
class TestMatrixSpec:
    """Choice of the test matrix W used by the variational projection."""

    __test__ = False  # keep pytest from collecting this class

    kind: TestMatrixKind = TestMatrixKind.RANDOM
    m: Optional[int] = None
    density: Optional[float] = None

    def __post_init__(self) -> None:
        if self.m is not None and self.m < 1:
            raise ValueError(f"Test matrix column count must be >= 1, got {self.m}")
        if self.density is not None and not 0.0 < self.density <= 1.0:
            raise ValueError(f"Test matrix density must lie in (0, 1], got {self.density}")

    @classmethod
    def from_string(cls, value: str) -> "TestMatrixSpec":
        """Parse ``identity``, ``features``, ``random``, ``random:M`` or ``random:M:DENSITY``."""
        parts = value.strip().lower().split(":")
        try:
            kind = TestMatrixKind(parts[0])
        except ValueError as exc:
            raise ValueError(f"Unsupported test matrix: {value}") from exc
        if kind is not TestMatrixKind.RANDOM:
            if len(parts) > 1:
                raise ValueError(f"Unexpected arguments for test matrix: {value}")
            return cls(kind)
        try:
            m = int(parts[1]) if len(parts) > 1 and parts[1] else None
            density = float(parts[2]) if len(parts) > 2 and parts[2] else None
        except ValueError as exc:
            raise ValueError(f"Invalid random test matrix spec: {value}") from exc
        return cls(kind, m=m, density=density)

    def __str__(self) -> str:
        if self.kind is not TestMatrixKind.RANDOM:
            return self.kind.value
        parts = [self.kind.value]
        if self.m is not None or self.density is not None:
            parts.append("" if self.m is None else str(self.m))
        if self.density is not None:
            parts.append(f"{self.density:g}")
        return ":".join(parts)


@dataclass
class SolverSettings:
    """Runtime defaults for tolerances, iteration caps and logging."""

    tol: float = 1e-8
    oracle_tol: float = 1e-10
    max_iter: int = 10000
    log_level: str = "INFO"
    log_format: str = "text"

    def __post_init__(self) -> None:
        if self.tol <= 0 or self.oracle_tol <= 0:
            raise ValueError("Tolerances must be strictly positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.log_format not in ("text", "json"):
            raise ValueError(f"Unsupported log format: {self.log_format}")

    @classmethod
    def from_env(cls) -> "SolverSettings":
        """Create settings using environment variables."""
        try:
            tol = float(os.getenv("TROPICAL_ADP_TOL", "1e-8"))
            oracle_tol = float(os.getenv("TROPICAL_ADP_ORACLE_TOL", "1e-10"))
            max_iter = int(os.getenv("TROPICAL_ADP_MAX_ITER", "10000"))
        except ValueError as exc:
            raise ValueError(f"Invalid numeric solver setting in environment: {exc}") from exc

        log_level = os.getenv("TROPICAL_ADP_LOG_LEVEL") or os.getenv("LOG_LEVEL", "INFO")
        log_format = os.getenv("TROPICAL_ADP_LOG_FORMAT", "text").strip().lower()
        return cls(
            tol=tol,
            oracle_tol=oracle_tol,
            max_iter=max_iter,
            log_level=log_level.upper(),
            log_format=log_format,
        )
