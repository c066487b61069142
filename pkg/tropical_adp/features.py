"""Feature construction: reward-binning min-plus bases, the full basis, files and test matrices."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
from numpy.typing import NDArray

from .config import FeatureKind, FeatureSpec, InfinitySpec, TestMatrixKind, TestMatrixSpec
from .conventional import LsBasis
from .errors import FeatureLoadError, InvalidArgumentError
from .mdp import Mdp, flatten_q
from .minplus import MP_ZERO, SpanBasis, identity_matrix, load_matrix_csv

DEFAULT_ZEROS_PER_COLUMN = 2.0

logger = logging.getLogger(__name__)

InfinityLike = Union[float, InfinitySpec]


def _infinity_value(infinity: Optional[InfinityLike]) -> float:
    if infinity is None:
        return MP_ZERO
    if isinstance(infinity, InfinitySpec):
        return infinity.value
    value = float(infinity)
    if not value > 0:
        raise InvalidArgumentError(f"infinity stand-in must be positive, got {value}")
    return value


def reward_bin_edges(g_min: float, g_max: float, k: int) -> NDArray[np.float64]:
    """
    Closed bin intervals ``[g_min + i·L/k, g_min + (i+1)·L/k]`` as a (k, 2) array.

    The last upper edge is pinned to ``g_max`` so rounding cannot leave the largest reward
    outside every bin.
    """
    width = (g_max - g_min) / k
    lower = g_min + np.arange(k) * width
    upper = g_min + np.arange(1, k + 1) * width
    upper[-1] = g_max
    return np.column_stack([lower, upper])


def build_reward_bins(mdp: Mdp, k: int, infinity: Optional[InfinityLike] = None) -> SpanBasis:
    """
    Min-plus features from reward levels.

    Row ``s*d + a`` holds 0 in every bin whose closed interval contains ``g_a(s)`` and the
    infinity stand-in elsewhere. Rows therefore have min-plus unit norm, and two pairs that
    share no bin are at min-plus distance +∞ (or at least the sentinel).

    Constant rewards (L = 0) collapse to a single all-zero column.
    """
    if k < 1:
        raise InvalidArgumentError(f"number of reward bins must be >= 1, got {k}")
    inf_value = _infinity_value(infinity)
    rewards = flatten_q(mdp.rewards)
    g_min, g_max = float(rewards.min()), float(rewards.max())

    if g_max == g_min:
        logger.warning(
            "Rewards are constant; reward binning degenerates to a single feature",
            extra={"requested_k": k, "reward": g_min},
        )
        return SpanBasis(np.zeros((rewards.size, 1)), infinity=inf_value)

    edges = reward_bin_edges(g_min, g_max, k)
    member = (rewards[:, np.newaxis] >= edges[:, 0]) & (rewards[:, np.newaxis] <= edges[:, 1])
    matrix = np.where(member, 0.0, inf_value)
    logger.debug(
        "Built reward-bin features",
        extra={"k": k, "g_min": g_min, "g_max": g_max, "shared_rows": int(np.sum(member.sum(axis=1) > 1))},
    )
    return SpanBasis(matrix, infinity=inf_value)


def build_full_basis(size: int, infinity: Optional[InfinityLike] = None) -> SpanBasis:
    """Min-plus identity basis; its span is the whole space."""
    return SpanBasis(identity_matrix(size, _infinity_value(infinity)), infinity=_infinity_value(infinity))


def load_features(path: Union[str, Path], infinity: Optional[InfinityLike] = None) -> SpanBasis:
    """
    Load a feature matrix from JSON (``"inf"`` tokens) or CSV.

    JSON may be a bare list of rows or ``{"infinity": ..., "matrix": [...]}``. An explicit
    ``infinity`` argument overrides the file's setting.

    Raises:
        FeatureLoadError: unreadable file, malformed content, or a row without a finite entry.
    """
    file_path = Path(path)
    if file_path.suffix.lower() == ".csv":
        try:
            basis = SpanBasis(load_matrix_csv(file_path))
        except InvalidArgumentError as exc:
            raise FeatureLoadError(f"{file_path}: {exc}") from exc
    else:
        basis = SpanBasis.load(file_path)

    if infinity is not None:
        try:
            basis = SpanBasis(np.asarray(basis.matrix), infinity=_infinity_value(infinity))
        except InvalidArgumentError as exc:
            raise FeatureLoadError(f"{file_path}: {exc}") from exc
    logger.info("Loaded feature matrix", extra={"path": str(file_path), "rows": basis.rows, "k": basis.k})
    return basis


def build_features(spec: FeatureSpec, mdp: Mdp) -> SpanBasis:
    """Build the basis described by ``spec`` for the Q space of ``mdp``."""
    if spec.kind is FeatureKind.REWARD_BINS:
        return build_reward_bins(mdp, spec.k, spec.infinity)
    if spec.kind is FeatureKind.FULL_BASIS:
        return build_full_basis(mdp.n * mdp.d, spec.infinity)

    basis = load_features(spec.path, spec.infinity)
    if basis.rows != mdp.n * mdp.d:
        raise FeatureLoadError(f"{spec.path} has {basis.rows} rows, expected n·d = {mdp.n * mdp.d}")
    return basis


def build_test_matrix(
    spec: TestMatrixSpec,
    basis: SpanBasis,
    rng: Optional[np.random.Generator] = None,
) -> NDArray[np.float64]:
    """
    Test matrix W for the variational projection.

    ``identity`` reproduces the exact projection, ``features`` reuses Φ, and ``random`` draws a
    binary matrix with entries 0 (probability ``density``) or the infinity stand-in. Random
    matrices default to ``rows // 5`` columns and about two zeros per column, so each column
    constrains only a few rows; a column that came out without a zero gets one at a random row.
    """
    if spec.kind is TestMatrixKind.IDENTITY:
        return identity_matrix(basis.rows, basis.infinity)
    if spec.kind is TestMatrixKind.FEATURES:
        return np.array(basis.matrix, dtype=float)

    if rng is None:
        raise InvalidArgumentError("a random test matrix needs a random generator")
    m = spec.m if spec.m is not None else max(1, basis.rows // 5)
    density = spec.density if spec.density is not None else min(1.0, DEFAULT_ZEROS_PER_COLUMN / basis.rows)
    mask = rng.random((basis.rows, m)) < density
    for column in np.flatnonzero(~mask.any(axis=0)):
        mask[rng.integers(0, basis.rows), column] = True
    return np.where(mask, 0.0, basis.infinity)


def build_random_ls_basis(n: int, k: int, rng: np.random.Generator) -> LsBasis:
    """Conventional n×k basis: a constant column followed by standard-normal columns."""
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"least-squares basis needs 1 <= k <= n, got k={k}, n={n}")
    matrix = np.ones((n, k))
    if k > 1:
        matrix[:, 1:] = rng.standard_normal((n, k - 1))
    return LsBasis(matrix)

