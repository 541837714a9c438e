"""Finite-set Euclidean primitives.

Compact sets are finite point lists, so every supremum taken over a set is
an exact maximum. General compacts have to be approximated by samples.
"""
import logging
import math
from typing import Iterable, Iterator, Union

import numpy as np

from wcm_inclusion.exceptions import (
    ConvergenceError,
    DimensionMismatch,
    EmptySetError,
    NonFiniteError,
)

logger = logging.getLogger(__name__)

Vector = np.ndarray


def as_vector(coords: Union[Iterable[float], float, np.ndarray]) -> Vector:
    """Convert `coords` to a read-only 1-D float array.

    Parameters
    ----------
    coords : Union[Iterable[float], float, np.ndarray]
        Coordinates. A bare number is read as a 1-D vector.

    Returns
    -------
    Vector
        Read-only `np.ndarray` of shape `(n,)` with `n >= 1`.

    """
    vec = np.array(coords, dtype=float, ndmin=1)
    if vec.ndim != 1 or vec.size == 0:
        raise DimensionMismatch(f"expected a non-empty 1-D vector, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise NonFiniteError(f"non-finite coordinate in {vec.tolist()}")
    vec.setflags(write=False)
    return vec


def _check_dims(u: Vector, v: Vector):
    if u.shape != v.shape:
        raise DimensionMismatch(f"dimension {u.shape[-1]} does not match {v.shape[-1]}")


def lex_key(v: Vector) -> tuple:
    return tuple(float(c) for c in v)


def inner(u: Vector, v: Vector) -> float:
    """Euclidean inner product, summed with `math.fsum`."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_dims(u, v)
    return math.fsum(u * v)


class compact_set:
    """A nonempty finite point set in R^n standing for one value F(x)."""

    def __init__(self, points: Union[Iterable, np.ndarray]):
        arr = np.array(points, dtype=float)
        if arr.size == 0:
            raise EmptySetError("a compact set needs at least one point")
        if arr.ndim == 1:
            # a flat list of numbers is a set of 1-D points
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise DimensionMismatch(f"points must form a 2-D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("non-finite coordinate in compact set")
        arr.setflags(write=False)
        self._points = arr

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def dimension(self) -> int:
        return self._points.shape[1]

    def __len__(self) -> int:
        return self._points.shape[0]

    def __iter__(self) -> Iterator[Vector]:
        return iter(self._points)

    def __contains__(self, v) -> bool:
        v = np.asarray(v, dtype=float).reshape(-1)
        if v.shape[0] != self.dimension:
            return False
        return bool(np.any(np.all(self._points == v, axis=1)))

    def canonical(self) -> "compact_set":
        """Sorted lexicographically, duplicates removed."""
        return compact_set(np.unique(self._points, axis=0))

    def norm(self) -> float:
        """‖A‖, the largest Euclidean norm of a point of the set."""
        return float(np.max(np.linalg.norm(self._points, axis=1)))

    def to_list(self) -> list:
        return self._points.tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, compact_set):
            return NotImplemented
        return bool(
            self.dimension == other.dimension
            and np.array_equal(self.canonical().points, other.canonical().points)
        )

    def __hash__(self):
        return hash(self.canonical().points.tobytes())

    def __repr__(self):
        return f"compact_set({self.to_list()!r})"


def _check_set(A: compact_set, d: Vector) -> Vector:
    d = np.asarray(d, dtype=float).reshape(-1)
    if d.shape[0] != A.dimension:
        raise DimensionMismatch(f"set dimension {A.dimension} does not match {d.shape[0]}")
    return d


def _lex_smallest(candidates) -> Vector:
    return min(candidates, key=lex_key)


def support_value(A: compact_set, d: Vector) -> float:
    """Support function δ*(d, A) = max over a in A of <d, a>."""
    d = _check_set(A, d)
    return max(inner(d, a) for a in A)


def support_argmax(A: compact_set, d: Vector) -> Vector:
    """A point of `A` attaining `support_value(A, d)`.

    Ties go to the lexicographically smallest point, so repeated calls on
    the same input return the same point.
    """
    d = _check_set(A, d)
    values = [inner(d, a) for a in A]
    best = max(values)
    return _lex_smallest(a for a, value in zip(A, values) if value == best)


def nearest_point(A: compact_set, p: Vector) -> Vector:
    """The point of `A` nearest `p`, ties broken lexicographically."""
    p = _check_set(A, p)
    distances = np.linalg.norm(A.points - p, axis=1)
    best = distances.min()
    return _lex_smallest(a for a, dist in zip(A, distances) if dist == best)


def dist_to_set(p: Vector, A: compact_set) -> float:
    p = _check_set(A, p)
    return float(np.min(np.linalg.norm(A.points - p, axis=1)))


def dist_to_hull(
    p: Vector, A: compact_set, tol: float = 1e-9, max_iterations: int = 10_000
) -> float:
    """Distance from `p` to the convex hull of `A`.

    Pairwise Frank-Wolfe iterations over the weights of a convex combination
    of the points of `A`, started from the nearest point of `A`, with exact
    line search. The Frank-Wolfe duality gap bounds the excess of
    `0.5 * |y - p|**2` over its minimum; iteration stops once the gap
    guarantees the returned distance is within `tol` of the true one.

    Parameters
    ----------
    p : Vector
        Query point.
    A : compact_set
        The finite set whose hull is measured against.
    tol : float
        Absolute accuracy of the returned distance, must be positive.
    max_iterations : int
        Iteration cap; `ConvergenceError` is raised when it is hit.

    Returns
    -------
    float
        Distance within `tol` of the true one and never larger than
        `dist_to_set(p, A)`.

    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = _check_set(A, p)
    points = A.points
    weights = np.zeros(len(A))
    weights[int(np.argmin(np.linalg.norm(points - p, axis=1)))] = 1.0
    y = points.T @ weights
    best = float(np.linalg.norm(y - p))

    for iteration in range(max_iterations):
        grad = y - p
        dist = float(np.linalg.norm(grad))
        best = min(best, dist)
        scores = points @ grad
        toward = int(np.argmin(scores))
        gap = float(grad @ y - scores[toward])
        # d(y) - d* <= 2 gap / d(y), and d(y) <= sqrt(2 gap) when d* = 0;
        # an interior p only ever gets d(y) <= tol
        if gap <= 0 or dist <= tol or 2.0 * gap <= tol * dist or math.sqrt(2.0 * gap) <= tol:
            logger.debug("dist_to_hull converged after %d iterations", iteration)
            return best
        active = np.flatnonzero(weights > 0)
        away = int(active[np.argmax(scores[active])])
        direction = points[toward] - points[away]
        length2 = float(direction @ direction)
        if length2 == 0.0:
            return best
        step = min(max(-float(grad @ direction) / length2, 0.0), weights[away])
        weights[toward] += step
        weights[away] -= step
        y = points.T @ weights

    raise ConvergenceError(
        f"dist_to_hull did not reach tol={tol} within {max_iterations} iterations"
    )
