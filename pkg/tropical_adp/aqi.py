"""Min-plus approximate Q iteration (AQI), its variational form (VAQI) and error bounds.

Both schemes iterate ``v_{n+1} = Π H v_n`` on flattened Q vectors inside the span
𝒱 = {Φ ⊗ r}. Π is monotone and commutes with constant shifts, so Π H inherits the
α-contraction of H in the sup norm and the fixed point is unique.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .bellman import bellman_H, bellman_T, greedy_from_q, sup_distance, sup_norm
from .errors import InvalidArgumentError, InvariantViolationError
from .mdp import Mdp, Policy, QFunction, ValueFunction, flatten_q, unflatten_q, validate_q
from .minplus import ExactProjector, SpanBasis, VariationalProjector, residuate
from .solvers import fixed_point_iteration, policy_evaluation_exact

logger = logging.getLogger(__name__)

BOUND_SLACK = 1e-9

Projector = Union[ExactProjector, VariationalProjector]


@dataclass
class AqiResult:
    """
    Fixed point of a projected Bellman iteration.

    ``q_approx`` is ``Φ ⊗ weights`` reshaped to n×d (None for state-value iteration) and
    ``value_approx`` its row-wise maximum, or the state-value fixed point itself.
    """

    method: str
    weights: NDArray[np.float64]
    q_approx: Optional[QFunction]
    value_approx: ValueFunction
    iterations: int
    final_residual: float
    tol: float
    trace: List[float] = field(default_factory=list)

    @property
    def approximation(self) -> NDArray[np.float64]:
        """The iterate in the space it was computed in (flattened Q or state values)."""
        return flatten_q(self.q_approx) if self.q_approx is not None else self.value_approx

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "weights": [float(w) if np.isfinite(w) else "inf" for w in self.weights],
            "q_approx": None if self.q_approx is None else self.q_approx.tolist(),
            "value_approx": self.value_approx.tolist(),
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "tol": self.tol,
        }


def _projector(basis: SpanBasis, w: Optional[ArrayLike]) -> Projector:
    return ExactProjector(basis) if w is None else VariationalProjector(basis, w)


def projected_q_operator(
    mdp: Mdp, basis: SpanBasis, w: Optional[ArrayLike] = None
) -> Callable[[ArrayLike], NDArray[np.float64]]:
    """``v ↦ Π H v`` on flattened Q vectors; Π^W when a test matrix is given."""
    _check_rows(mdp, basis, mdp.n * mdp.d)
    projector = _projector(basis, w)
    return lambda v: projector(flatten_q(bellman_H(mdp, unflatten_q(v, mdp.d))))


def _check_rows(mdp: Mdp, basis: SpanBasis, expected: int) -> None:
    if basis.rows != expected:
        raise InvalidArgumentError(
            f"feature matrix has {basis.rows} rows, expected {expected} for n={mdp.n}, d={mdp.d}"
        )


def _projected_iteration(
    mdp: Mdp,
    basis: SpanBasis,
    projector: Projector,
    bellman: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    start: NDArray[np.float64],
    initial_weights: Optional[ArrayLike],
    *,
    tol: float,
    max_iter: int,
    name: str,
) -> Tuple[NDArray[np.float64], NDArray[np.float64], Any]:
    if tol <= 0:
        raise InvalidArgumentError(f"tol must be > 0, got {tol}")
    if initial_weights is None:
        weights, v0 = projector.solve(start)
    else:
        weights = np.asarray(initial_weights, dtype=float)
        v0 = basis.span(weights)
        if not np.all(np.isfinite(v0)):
            raise InvalidArgumentError("initial weights must give a finite starting point")

    latest = {"weights": weights}

    def step(v: NDArray[np.float64]) -> NDArray[np.float64]:
        latest["weights"], projected = projector.solve(bellman(v))
        return projected

    logger.info(
        "Starting projected iteration",
        extra={"solver": name, "n": mdp.n, "d": mdp.d, "k": basis.k, "tol": tol},
    )
    result = fixed_point_iteration(
        step, v0, threshold=tol * (1.0 - mdp.alpha), max_iter=max_iter, name=name
    )
    return latest["weights"], result.value, result


def _q_iteration(
    mdp: Mdp,
    basis: SpanBasis,
    w: Optional[ArrayLike],
    tol: float,
    max_iter: int,
    initial_weights: Optional[ArrayLike],
    name: str,
) -> AqiResult:
    _check_rows(mdp, basis, mdp.n * mdp.d)
    projector = _projector(basis, w)
    weights, v, result = _projected_iteration(
        mdp,
        basis,
        projector,
        lambda x: flatten_q(bellman_H(mdp, unflatten_q(x, mdp.d))),
        flatten_q(mdp.rewards),
        initial_weights,
        tol=tol,
        max_iter=max_iter,
        name=name,
    )
    q_approx = unflatten_q(v, mdp.d)
    return AqiResult(
        method=name,
        weights=weights,
        q_approx=q_approx,
        value_approx=q_approx.max(axis=1),
        iterations=result.iterations,
        final_residual=result.residual,
        tol=tol,
        trace=result.trace,
    )


def aqi(
    mdp: Mdp,
    basis: SpanBasis,
    tol: float = 1e-8,
    max_iter: int = 10000,
    *,
    initial_weights: Optional[ArrayLike] = None,
) -> AqiResult:
    """
    Approximate Q iteration ``Φ ⊗ r_{n+1} = Π_M H (Φ ⊗ r_n)``.

    Starts from ``Π_M g`` (or ``Φ ⊗ initial_weights``) and stops when the sup-norm step is at
    most ``tol·(1−α)``, which puts the last iterate within ``tol`` of the fixed point.

    Raises:
        ConvergenceError: ``max_iter`` sweeps without meeting the tolerance; carries the trace.
        ProjectionUndefinedError: propagated from the projection.
    """
    return _q_iteration(mdp, basis, None, tol, max_iter, initial_weights, "aqi")


def vaqi(
    mdp: Mdp,
    basis: SpanBasis,
    w: ArrayLike,
    tol: float = 1e-8,
    max_iter: int = 10000,
    *,
    initial_weights: Optional[ArrayLike] = None,
) -> AqiResult:
    """Variational AQI: as :func:`aqi` with Π^W_M in place of Π_M."""
    return _q_iteration(mdp, basis, w, tol, max_iter, initial_weights, "vaqi")


def avi(
    mdp: Mdp,
    basis: SpanBasis,
    tol: float = 1e-8,
    max_iter: int = 10000,
    *,
    initial_weights: Optional[ArrayLike] = None,
) -> AqiResult:
    """Min-plus approximate value iteration ``v_{n+1} = Π_M T v_n`` with an n×k basis."""
    _check_rows(mdp, basis, mdp.n)
    weights, v, result = _projected_iteration(
        mdp,
        basis,
        ExactProjector(basis),
        lambda x: bellman_T(mdp, x),
        mdp.rewards.max(axis=1),
        initial_weights,
        tol=tol,
        max_iter=max_iter,
        name="avi",
    )
    return AqiResult(
        method="avi",
        weights=weights,
        q_approx=None,
        value_approx=v,
        iterations=result.iterations,
        final_residual=result.residual,
        tol=tol,
        trace=result.trace,
    )


def best_sup_norm_weights(basis: SpanBasis, target: ArrayLike) -> Tuple[NDArray[np.float64], float]:
    """
    Weights r̃ minimizing ``‖target − Φ ⊗ r‖∞`` and the minimal error ε.

    The least majorant ``Φ ⊗ residuate(Φ, target)`` overshoots by at most δ; shifting every
    finite weight down by δ/2 centres the error, giving ε = δ/2.
    """
    u = np.asarray(target, dtype=float).reshape(-1)
    weights = residuate(basis.matrix, u)
    delta = sup_distance(basis.span(weights), u)
    shifted = np.where(np.isfinite(weights), weights - delta / 2.0, weights)
    return shifted, delta / 2.0


@dataclass(frozen=True)
class ErrorBoundReport:
    """
    A-posteriori check of ``‖Q* − Φ⊗r*‖∞ ≤ (2ε + β)/(1 − α)``.

    ``statement_bound`` is the alternative constant ``2(ε + β)/(1 + α)``; it is reported and
    never enforced.
    """

    epsilon: float
    beta: float
    bound: float
    statement_bound: float
    measured: float
    slack: float = BOUND_SLACK

    @property
    def holds(self) -> bool:
        return self.measured <= self.bound + self.slack

    def to_dict(self) -> Dict[str, float]:
        return {
            "epsilon": self.epsilon,
            "beta": self.beta,
            "bound": self.bound,
            "statement_bound": self.statement_bound,
            "measured": self.measured,
            "slack": self.slack,
        }


def error_bound_report(
    mdp: Mdp,
    basis: SpanBasis,
    w: Optional[ArrayLike],
    result: AqiResult,
    optimum: ArrayLike,
    *,
    check: bool = True,
) -> ErrorBoundReport:
    """
    Compare an AQI/VAQI fixed point with the exact optimum.

    ``w=None`` means the exact projection, for which β = 0. ``optimum`` is Q* (or J* for
    :func:`avi` results). The enforced slack is 1e-9 plus the iteration tolerance, since the
    returned iterate is only within ``tol`` of the true fixed point.

    Raises:
        InvariantViolationError: the measured error exceeds the bound and ``check`` is set.
    """
    target = np.asarray(optimum, dtype=float).reshape(-1)
    approximation = result.approximation
    if target.shape != approximation.shape:
        raise InvalidArgumentError(f"optimum has {target.size} entries, approximation has {approximation.size}")

    best_weights, epsilon = best_sup_norm_weights(basis, target)
    if w is None:
        beta = 0.0
    else:
        best = basis.span(best_weights)
        beta = sup_distance(best, VariationalProjector(basis, w)(best))
    factor = 1.0 - mdp.alpha
    report = ErrorBoundReport(
        epsilon=epsilon,
        beta=beta,
        bound=(2.0 * epsilon + beta) / factor,
        statement_bound=2.0 * (epsilon + beta) / (1.0 + mdp.alpha),
        measured=sup_norm(target - approximation),
        slack=BOUND_SLACK + result.tol,
    )
    logger.info("Error bound report", extra={"solver": result.method, **report.to_dict()})
    if check and not report.holds:
        raise InvariantViolationError(
            f"{result.method}: measured error {report.measured:.6g} exceeds bound {report.bound:.6g}"
        )
    return report


def greedy_and_evaluate(mdp: Mdp, q_approx: ArrayLike) -> Tuple[Policy, ValueFunction]:
    """Greedy policy of an approximate Q table and its exact value function."""
    policy = greedy_from_q(validate_q(mdp, q_approx))
    return policy, policy_evaluation_exact(mdp, policy)
