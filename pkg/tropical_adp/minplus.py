"""(min,+) semiring algebra, residuation and projections onto a min-plus span.

Scalars live in ℝ ∪ {+∞} with ``x ⊕ y = min(x, y)`` and ``x ⊗ y = x + y``. The additive
identity is +∞ and the multiplicative identity is 0. Vectors and matrices are dense float
arrays; −∞ only ever appears transiently inside residuation, where ``u(i) − (+∞)`` means
"no constraint" and is dropped from the maximum.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike, NDArray

from .errors import FeatureLoadError, InvalidArgumentError, OutputError, ProjectionUndefinedError

MP_ZERO = math.inf
MP_ONE = 0.0
INF_TOKEN = "inf"

MinPlusVector = NDArray[np.float64]
MinPlusMatrix = NDArray[np.float64]


def oplus(x: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
    """Semiring addition ``min(x, y)``."""
    return np.minimum(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


def otimes(x: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
    """Semiring multiplication ``x + y`` with +∞ absorbing."""
    a = _check_entries(np.asarray(x, dtype=float), "left operand")
    b = _check_entries(np.asarray(y, dtype=float), "right operand")
    return a + b


def _check_entries(values: NDArray[np.float64], what: str) -> NDArray[np.float64]:
    if np.any(np.isnan(values)):
        raise InvalidArgumentError(f"{what} contains NaN")
    if np.any(values == -np.inf):
        raise InvalidArgumentError(f"{what} contains -inf, which is not a min-plus scalar")
    return values


def as_minplus_matrix(matrix: ArrayLike, what: str = "min-plus matrix") -> MinPlusMatrix:
    """Validate a rectangular array over ℝ ∪ {+∞}."""
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidArgumentError(f"{what} must be a non-empty 2-D array, got shape {arr.shape}")
    return _check_entries(arr, what)


def as_minplus_vector(vector: ArrayLike, what: str = "min-plus vector") -> MinPlusVector:
    arr = np.asarray(vector, dtype=float)
    if arr.ndim != 1:
        raise InvalidArgumentError(f"{what} must be 1-D, got shape {arr.shape}")
    return _check_entries(arr, what)


def identity_matrix(size: int, infinity: float = MP_ZERO) -> MinPlusMatrix:
    """Min-plus identity: 0 on the diagonal, +∞ (or the sentinel) elsewhere."""
    if size < 1:
        raise InvalidArgumentError(f"identity size must be >= 1, got {size}")
    eye = np.full((size, size), float(infinity))
    np.fill_diagonal(eye, MP_ONE)
    return eye


def mp_mat_vec(phi: ArrayLike, r: ArrayLike) -> MinPlusVector:
    """``(Φ ⊗ r)(i) = min_j (Φ(i, j) + r(j))``."""
    matrix = as_minplus_matrix(_raw(phi), "Φ")
    weights = as_minplus_vector(r, "r")
    if matrix.shape[1] != weights.shape[0]:
        raise InvalidArgumentError(f"Φ has {matrix.shape[1]} columns but r has length {weights.shape[0]}")
    return (matrix + weights[np.newaxis, :]).min(axis=1)


def mp_mat_mat(a: ArrayLike, b: ArrayLike) -> MinPlusMatrix:
    """``(A ⊗ B)(i, j) = min_l (A(i, l) + B(l, j))``."""
    left = as_minplus_matrix(_raw(a), "A")
    right = as_minplus_matrix(_raw(b), "B")
    if left.shape[1] != right.shape[0]:
        raise InvalidArgumentError(f"cannot multiply {left.shape} by {right.shape}")
    product = np.full((left.shape[0], right.shape[1]), MP_ZERO)
    # Accumulate over the inner index to keep memory at rows×cols.
    for inner in range(left.shape[1]):
        np.minimum(product, left[:, inner, np.newaxis] + right[np.newaxis, inner, :], out=product)
    return product


def mp_dot(x: ArrayLike, y: ArrayLike) -> float:
    """Min-plus dot product ``min_i (x(i) + y(i))``."""
    left = as_minplus_vector(x, "x")
    right = as_minplus_vector(y, "y")
    if left.shape != right.shape:
        raise InvalidArgumentError(f"dot product of lengths {left.shape[0]} and {right.shape[0]}")
    if left.size == 0:
        return MP_ZERO
    return float(np.min(left + right))


def _residuate_matrix(matrix: NDArray[np.float64], target: NDArray[np.float64]) -> MinPlusVector:
    # r(j) = max_i (target(i) − M(i, j)); +∞ entries of M give −∞ and drop out of the max.
    gaps = target[:, np.newaxis] - matrix
    weights = gaps.max(axis=0)
    weights[weights == -np.inf] = np.inf
    return weights


def residuate(phi: ArrayLike, u: ArrayLike) -> MinPlusVector:
    """
    Least weight vector r with ``Φ ⊗ r ≥ u``.

    Computes ``r(j) = max_i (u(i) − Φ(i, j))`` over the finite entries of column j; a column
    that is entirely +∞ gets ``r(j) = +∞``.

    Raises:
        ProjectionUndefinedError: a row of Φ is entirely +∞.
        InvalidArgumentError: shape mismatch or non-finite u.
    """
    matrix = as_minplus_matrix(_raw(phi), "Φ")
    target = _finite_target(u, matrix.shape[0])
    empty_rows = np.flatnonzero(np.all(np.isinf(matrix), axis=1))
    if empty_rows.size:
        row = int(empty_rows[0])
        raise ProjectionUndefinedError(f"row {row} of Φ is entirely +inf; projection is undefined there", row=row)
    return _residuate_matrix(matrix, target)


def _finite_target(u: ArrayLike, rows: int) -> NDArray[np.float64]:
    target = np.asarray(u, dtype=float)
    if target.shape != (rows,):
        raise InvalidArgumentError(f"vector of length {rows} expected, got shape {target.shape}")
    if not np.all(np.isfinite(target)):
        raise InvalidArgumentError("only finite vectors can be projected")
    return target


@dataclass(frozen=True, eq=False)
class SpanBasis:
    """
    Feature matrix Φ whose columns span the subsemimodule 𝒱 = {Φ ⊗ r}.

    ``infinity`` is the value standing in for +∞: ``math.inf`` for exact semantics or a
    finite sentinel. Every row must hold at least one entry below ``infinity``.
    """

    matrix: MinPlusMatrix
    infinity: float = MP_ZERO

    def __post_init__(self) -> None:
        matrix = as_minplus_matrix(self.matrix, "feature matrix").copy()
        infinity = float(self.infinity)
        if not infinity > 0:
            raise InvalidArgumentError(f"infinity stand-in must be positive, got {infinity}")
        if not math.isinf(infinity):
            matrix[np.isinf(matrix)] = infinity
        empty_rows = np.flatnonzero(np.all(matrix >= infinity, axis=1))
        if empty_rows.size:
            row = int(empty_rows[0])
            raise ProjectionUndefinedError(f"feature row {row} has no finite entry", row=row)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "infinity", infinity)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def k(self) -> int:
        return self.matrix.shape[1]

    @property
    def uses_sentinel(self) -> bool:
        return not math.isinf(self.infinity)

    def row(self, index: int) -> MinPlusVector:
        return self.matrix[index]

    def span(self, r: ArrayLike) -> MinPlusVector:
        """Element ``Φ ⊗ r`` of the span."""
        return mp_mat_vec(self.matrix, r)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "infinity": INF_TOKEN if not self.uses_sentinel else self.infinity,
            "matrix": matrix_to_json(self.matrix),
        }

    @classmethod
    def from_dict(cls, data: Union[Dict[str, Any], List[Any]]) -> "SpanBasis":
        """Accept either ``{"infinity": ..., "matrix": [...]}`` or a bare array of rows."""
        if isinstance(data, list):
            return cls(matrix_from_json(data))
        if not isinstance(data, dict) or "matrix" not in data:
            raise InvalidArgumentError("feature document must be a list of rows or an object with 'matrix'")
        infinity = _scalar_from_json(data.get("infinity", INF_TOKEN))
        return cls(matrix_from_json(data["matrix"]), infinity=infinity)

    def save(self, file_path: Union[str, Path]) -> None:
        path = Path(file_path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                json.dump(self.to_dict(), f)
        except OSError as exc:
            raise OutputError(f"Cannot write feature matrix to {path}: {exc}", path=str(path)) from exc

    @classmethod
    def load(cls, file_path: Union[str, Path]) -> "SpanBasis":
        path = Path(file_path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except OSError as exc:
            raise FeatureLoadError(f"Cannot read feature matrix {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise FeatureLoadError(f"{path} is not valid JSON: {exc}") from exc
        try:
            return cls.from_dict(data)
        except ProjectionUndefinedError as exc:
            raise FeatureLoadError(f"{path}: {exc}") from exc
        except InvalidArgumentError as exc:
            raise FeatureLoadError(f"{path}: {exc}") from exc


def _raw(matrix: Union[SpanBasis, ArrayLike]) -> ArrayLike:
    return matrix.matrix if isinstance(matrix, SpanBasis) else matrix


def _as_basis(phi: Union[SpanBasis, ArrayLike]) -> SpanBasis:
    return phi if isinstance(phi, SpanBasis) else SpanBasis(np.asarray(phi, dtype=float))


def project(phi: Union[SpanBasis, ArrayLike], u: ArrayLike) -> MinPlusVector:
    """Least element of 𝒱 that majorizes u: ``Π_M u = Φ ⊗ residuate(Φ, u)``."""
    return ExactProjector(_as_basis(phi))(u)


def project_variational(phi: Union[SpanBasis, ArrayLike], w: ArrayLike, u: ArrayLike) -> MinPlusVector:
    """Least element v of 𝒱 with ``W^T ⊗ v ≥ W^T ⊗ u``."""
    return VariationalProjector(_as_basis(phi), w)(u)


class ExactProjector:
    """Π_M for a fixed basis."""

    def __init__(self, basis: SpanBasis):
        self.basis = basis

    def weights(self, u: ArrayLike) -> MinPlusVector:
        return residuate(self.basis.matrix, u)

    def solve(self, u: ArrayLike) -> Tuple[MinPlusVector, MinPlusVector]:
        """Return ``(r, Φ ⊗ r)`` for the least majorant of u."""
        r = self.weights(u)
        return r, self.basis.span(r)

    def __call__(self, u: ArrayLike) -> MinPlusVector:
        return self.solve(u)[1]


class VariationalProjector:
    """
    Π^W_M for a fixed basis and test matrix.

    The least feasible weights solve ``A ⊗ r ≥ b`` with ``A = W^T ⊗ Φ`` (computed once) and
    ``b = W^T ⊗ u``, i.e. ``r = residuate(A, b)``.
    """

    def __init__(self, basis: SpanBasis, w: ArrayLike):
        test = as_minplus_matrix(w, "test matrix W")
        if test.shape[0] != basis.rows:
            raise InvalidArgumentError(f"W has {test.shape[0]} rows but Φ has {basis.rows}")
        blind = np.flatnonzero(~np.any(np.isfinite(test), axis=0))
        if blind.size:
            raise InvalidArgumentError(f"column {int(blind[0])} of W has no finite entry")
        self.basis = basis
        self.test_matrix = test
        self.constraint_matrix = mp_mat_mat(test.T, basis.matrix)

    def weights(self, u: ArrayLike) -> MinPlusVector:
        target = _finite_target(u, self.basis.rows)
        bounds = (self.test_matrix + target[:, np.newaxis]).min(axis=0)
        return _residuate_matrix(self.constraint_matrix, bounds)

    def solve(self, u: ArrayLike) -> Tuple[MinPlusVector, MinPlusVector]:
        r = self.weights(u)
        v = self.basis.span(r)
        unbounded = np.flatnonzero(np.isinf(v))
        if unbounded.size:
            row = int(unbounded[0])
            raise ProjectionUndefinedError(
                f"variational projection leaves coordinate {row} at +inf; W does not constrain it",
                row=row,
            )
        return r, v

    def __call__(self, u: ArrayLike) -> MinPlusVector:
        return self.solve(u)[1]


def _scalar_to_json(value: float) -> Union[float, str]:
    return INF_TOKEN if value == math.inf else float(value)


def _scalar_from_json(value: Any) -> float:
    if isinstance(value, str):
        if value.strip().lower() in (INF_TOKEN, "+inf", "infinity"):
            return math.inf
        raise InvalidArgumentError(f"unexpected token {value!r}; only 'inf' may appear as a string")
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"matrix entry {value!r} is not a number") from exc


def matrix_to_json(matrix: ArrayLike) -> List[List[Union[float, str]]]:
    """Nested lists with the string ``"inf"`` for +∞."""
    return [[_scalar_to_json(x) for x in row] for row in np.asarray(matrix, dtype=float)]


def matrix_from_json(rows: Any) -> MinPlusMatrix:
    if not isinstance(rows, list) or not rows or not all(isinstance(row, list) for row in rows):
        raise InvalidArgumentError("matrix must be a non-empty list of rows")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise InvalidArgumentError("matrix rows have different lengths")
    return as_minplus_matrix([[_scalar_from_json(x) for x in row] for row in rows])


def save_matrix_csv(matrix: Union[SpanBasis, ArrayLike], file_path: Union[str, Path]) -> None:
    """Write a min-plus matrix as CSV, with ``inf`` for +∞."""
    path = Path(file_path)
    frame = pd.DataFrame(np.asarray(_raw(matrix), dtype=float))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, header=False, index=False, float_format=None)
    except OSError as exc:
        raise OutputError(f"Cannot write matrix CSV to {path}: {exc}", path=str(path)) from exc


def load_matrix_csv(file_path: Union[str, Path]) -> MinPlusMatrix:
    path = Path(file_path)
    try:
        frame = pd.read_csv(path, header=None)
    except (OSError, ValueError) as exc:
        raise FeatureLoadError(f"Cannot read matrix CSV {path}: {exc}") from exc
    return as_minplus_matrix(frame.to_numpy(dtype=float))


def is_in_span(basis: SpanBasis, v: ArrayLike, *, atol: float = 0.0) -> bool:
    """Whether ``v`` equals its own projection (up to ``atol``)."""
    target = np.asarray(v, dtype=float)
    return bool(np.all(np.abs(project(basis, target) - target) <= atol))


def projection_weights(
    basis: SpanBasis, u: ArrayLike, w: Optional[ArrayLike] = None
) -> MinPlusVector:
    """Least weights for Π_M (``w`` is None) or Π^W_M."""
    projector = ExactProjector(basis) if w is None else VariationalProjector(basis, w)
    return projector.weights(u)
