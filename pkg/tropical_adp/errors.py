"""Exception hierarchy shared by the solvers, the experiment harness and the CLI."""

from __future__ import annotations

from typing import Any, List, Optional, Sequence


class TropicalAdpError(Exception):
    """Base class for every error raised by the library."""

    exit_code: int = 1

    def to_dict(self) -> dict:
        """Structured error payload used by the CLI error report."""
        return {
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code,
        }


class InvalidArgumentError(TropicalAdpError, ValueError):
    """Dimension mismatch or an input violating a documented invariant."""

    exit_code = 2


class ProjectionUndefinedError(InvalidArgumentError):
    """A projection coordinate cannot be represented by the min-plus span."""

    def __init__(self, message: str, *, row: Optional[int] = None):
        super().__init__(message)
        self.row = row


class FeatureLoadError(InvalidArgumentError):
    """A feature matrix file could not be read or failed validation."""


class ConvergenceError(TropicalAdpError):
    """An iterative scheme exhausted its iteration budget."""

    exit_code = 3

    def __init__(
        self,
        message: str,
        *,
        last_iterate: Any = None,
        residual: float = float("nan"),
        trace: Optional[Sequence[float]] = None,
    ):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual
        self.trace: List[float] = list(trace or [])

    def to_dict(self) -> dict:
        payload = super().to_dict()
        payload["residual"] = self.residual
        payload["iterations"] = len(self.trace)
        return payload


class NumericError(TropicalAdpError):
    """A numerical routine failed (singular solve, non-convergent power iteration)."""

    exit_code = 3


class RankDeficiencyError(NumericError):
    """A least-squares basis or Gram matrix is not of full column rank."""


class InvariantViolationError(TropicalAdpError, AssertionError):
    """A proven inequality failed on a computed instance."""

    exit_code = 1


class OutputError(TropicalAdpError, OSError):
    """Writing or reading an artifact failed."""

    exit_code = 4

    def __init__(self, message: str, *, path: Optional[str] = None):
        super().__init__(message)
        self.path = path
