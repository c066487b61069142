"""Least-squares projected Bellman evaluation (APE) and approximate policy iteration (API).

The projection is the D-weighted one, ``Π = Φ (Φ^T D Φ)^{-1} Φ^T D``, and the D-norm is
``‖x‖_D = sqrt(x^T D x)``. With D the stationary distribution of P_u, ``Π T_u`` contracts
with factor α in that norm.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .bellman import bellman_T_u, greedy_policy, sup_distance
from .errors import InvalidArgumentError, NumericError, RankDeficiencyError
from .mdp import Mdp, Policy, ValueFunction, validate_policy
from .solvers import fixed_point_iteration, policy_evaluation_exact, stationary_distribution

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10
WEIGHTING_MODES = ("stationary", "uniform")


@dataclass(frozen=True, eq=False)
class LsBasis:
    """Real n×k feature matrix of full column rank."""

    matrix: NDArray[np.float64]

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[1] < 1:
            raise InvalidArgumentError(f"basis must be a 2-D n×k array, got shape {matrix.shape}")
        n, k = matrix.shape
        if k > n:
            raise InvalidArgumentError(f"basis has more columns ({k}) than rows ({n})")
        if not np.all(np.isfinite(matrix)):
            raise InvalidArgumentError("least-squares basis entries must be finite")
        singular_values = np.linalg.svd(matrix, compute_uv=False)
        if singular_values[-1] <= RANK_TOLERANCE * max(1.0, singular_values[0]):
            raise RankDeficiencyError(
                f"basis is rank deficient (smallest singular value {singular_values[-1]:.3e})"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def k(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def identity(cls, n: int) -> "LsBasis":
        return cls(np.eye(n))


def validate_weights(D: ArrayLike, n: int) -> NDArray[np.float64]:
    """Check D is a strictly positive probability vector of length n."""
    weights = np.asarray(D, dtype=float)
    if weights.shape != (n,):
        raise InvalidArgumentError(f"weights must have length {n}, got shape {weights.shape}")
    if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
        raise InvalidArgumentError("projection weights must be strictly positive")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise InvalidArgumentError(f"projection weights must sum to 1, got {weights.sum()!r}")
    return weights


def d_norm(x: ArrayLike, D: ArrayLike) -> float:
    """``sqrt(x^T D x)``."""
    vector = np.asarray(x, dtype=float)
    weights = np.asarray(D, dtype=float)
    return float(np.sqrt(np.dot(weights, vector * vector)))


def ls_weights(basis: LsBasis, D: ArrayLike, x: ArrayLike) -> NDArray[np.float64]:
    """Coefficients ``(Φ^T D Φ)^{-1} Φ^T D x`` of the D-weighted least-squares fit."""
    weights = validate_weights(D, basis.n)
    target = np.asarray(x, dtype=float)
    if target.shape != (basis.n,):
        raise InvalidArgumentError(f"vector of length {basis.n} expected, got shape {target.shape}")
    weighted = basis.matrix.T * weights
    gram = weighted @ basis.matrix
    try:
        return np.linalg.solve(gram, weighted @ target)
    except np.linalg.LinAlgError as exc:
        raise RankDeficiencyError(f"Gram matrix Φ^T D Φ is singular: {exc}") from exc


def ls_project(basis: LsBasis, D: ArrayLike, x: ArrayLike) -> NDArray[np.float64]:
    """D-weighted least-squares projection of x onto span(Φ)."""
    return basis.matrix @ ls_weights(basis, D, x)


@dataclass
class ApeResult:
    """Fixed point Φr* = Π T_u Φr* of approximate policy evaluation."""

    weights: NDArray[np.float64]
    value_approx: ValueFunction
    iterations: int
    final_residual: float
    distribution: NDArray[np.float64]
    trace: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weights": self.weights.tolist(),
            "value_approx": self.value_approx.tolist(),
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "distribution": self.distribution.tolist(),
        }


def projection_distribution(
    mdp: Mdp,
    u: ArrayLike,
    *,
    weighting: str = "stationary",
    regularization: float = 0.0,
) -> NDArray[np.float64]:
    """State weighting D used by the least-squares projection for policy u."""
    if weighting not in WEIGHTING_MODES:
        raise InvalidArgumentError(f"weighting must be one of {WEIGHTING_MODES}, got {weighting!r}")
    if weighting == "uniform":
        return np.full(mdp.n, 1.0 / mdp.n)
    D = stationary_distribution(mdp, u, regularization=regularization)
    if np.any(D <= 0):
        raise NumericError(
            "stationary distribution puts zero mass on some states; "
            "retry with regularization > 0 or uniform weighting"
        )
    return D


def ape(
    mdp: Mdp,
    u: ArrayLike,
    basis: LsBasis,
    tol: float = 1e-8,
    max_iter: int = 10000,
    *,
    weighting: str = "stationary",
    regularization: float = 0.0,
) -> ApeResult:
    """
    Iterate ``Φ r_{n+1} = Π T_u Φ r_n`` from r_0 = 0.

    Stops once the D-norm step ``‖Φr_{n+1} − Φr_n‖_D`` drops to ``tol·(1−α)``. The uniform
    weighting mode carries no convergence guarantee.

    Raises:
        ConvergenceError: ``max_iter`` sweeps without meeting the tolerance.
        RankDeficiencyError: the Gram matrix is singular.
        NumericError: the stationary distribution could not be computed.
    """
    policy = validate_policy(mdp, u)
    if basis.n != mdp.n:
        raise InvalidArgumentError(f"basis has {basis.n} rows but the MDP has {mdp.n} states")
    if tol <= 0:
        raise InvalidArgumentError(f"tol must be > 0, got {tol}")
    D = projection_distribution(mdp, policy, weighting=weighting, regularization=regularization)

    latest = {"weights": np.zeros(basis.k)}

    def step(values: NDArray[np.float64]) -> NDArray[np.float64]:
        latest["weights"] = ls_weights(basis, D, bellman_T_u(mdp, policy, values))
        return basis.matrix @ latest["weights"]

    result = fixed_point_iteration(
        step,
        np.zeros(mdp.n),
        threshold=tol * (1.0 - mdp.alpha),
        max_iter=max_iter,
        name="ape",
        distance=lambda x, y: d_norm(np.asarray(x) - np.asarray(y), D),
    )
    return ApeResult(
        weights=latest["weights"],
        value_approx=result.value,
        iterations=result.iterations,
        final_residual=result.residual,
        distribution=D,
        trace=result.trace,
    )


def policy_hash(policy: ArrayLike) -> str:
    """Short stable fingerprint of a policy for logs."""
    return hashlib.sha1(np.asarray(policy, dtype=np.int64).tobytes()).hexdigest()[:12]


@dataclass
class ApiResult:
    """
    Record of an approximate policy iteration run.

    ``policies[i]`` was evaluated into ``evaluations[i]``. Unless the run converged, the last
    greedy policy is appended without a matching evaluation.
    """

    policies: List[Policy]
    evaluations: List[ApeResult]
    evaluation_errors: List[float]
    chattering: bool
    converged: bool
    discount: float
    cycle_start: Optional[int] = None

    @property
    def final_policy(self) -> Policy:
        return self.policies[-1]

    @property
    def performance_bound(self) -> float:
        """``2αδ/(1−α)²`` with δ the largest sup-norm evaluation error."""
        delta = max(self.evaluation_errors, default=0.0)
        return 2.0 * self.discount * delta / (1.0 - self.discount) ** 2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "policies": [p.tolist() for p in self.policies],
            "policy_hashes": [policy_hash(p) for p in self.policies],
            "evaluation_errors": list(self.evaluation_errors),
            "chattering": self.chattering,
            "converged": self.converged,
            "cycle_start": self.cycle_start,
            "performance_bound": self.performance_bound,
        }


def api(
    mdp: Mdp,
    basis: LsBasis,
    outer_iters: int = 20,
    tol: float = 1e-8,
    max_iter: int = 10000,
    *,
    initial_policy: Optional[ArrayLike] = None,
    weighting: str = "stationary",
    regularization: float = 0.0,
) -> ApiResult:
    """
    Approximate policy iteration: APE under D recomputed per policy, then greedy improvement.

    Stops when the greedy policy repeats the one just evaluated (converged) or revisits any
    earlier policy (chattering), or after ``outer_iters`` evaluations.
    """
    if outer_iters < 1:
        raise InvalidArgumentError(f"outer_iters must be >= 1, got {outer_iters}")
    policy = (
        greedy_policy(mdp, np.zeros(mdp.n)) if initial_policy is None else validate_policy(mdp, initial_policy)
    )
    policies: List[Policy] = [policy]
    evaluations: List[ApeResult] = []
    errors: List[float] = []
    chattering = False
    converged = False
    cycle_start: Optional[int] = None

    for iteration in range(1, outer_iters + 1):
        evaluation = ape(
            mdp, policy, basis, tol, max_iter, weighting=weighting, regularization=regularization
        )
        evaluations.append(evaluation)
        errors.append(sup_distance(evaluation.value_approx, policy_evaluation_exact(mdp, policy)))

        improved = greedy_policy(mdp, evaluation.value_approx)
        changed = int(np.sum(improved != policy))
        logger.info(
            "API iteration",
            extra={
                "iteration": iteration,
                "policy_hash": policy_hash(improved),
                "changed_states": changed,
                "evaluation_error": errors[-1],
            },
        )
        if changed == 0:
            converged = True
            break
        earlier = [i for i, previous in enumerate(policies[:-1]) if np.array_equal(previous, improved)]
        policies.append(improved)
        if earlier:
            chattering = True
            cycle_start = earlier[0]
            logger.warning(
                "API policy sequence revisits an earlier policy",
                extra={"iteration": iteration, "cycle_start": cycle_start, "policy_hash": policy_hash(improved)},
            )
            break
        policy = improved

    return ApiResult(
        policies=policies,
        evaluations=evaluations,
        evaluation_errors=errors,
        chattering=chattering,
        converged=converged,
        discount=mdp.alpha,
        cycle_start=cycle_start,
    )
