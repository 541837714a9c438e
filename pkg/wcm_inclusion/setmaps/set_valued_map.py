import itertools
import logging
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from wcm_inclusion.exceptions import DimensionMismatch, EmptySetError
from wcm_inclusion.geometry import Vector, as_vector, compact_set, dist_to_set

logger = logging.getLogger(__name__)


class set_valued_map:
    """A set-valued map F: R^n ⇉ R^n with compact (finite) values.

    Built-in kinds subclass this and set `kind`; `parameters()` returns the
    JSON-ready description used by problem documents.
    """

    kind = None

    def __init__(
        self,
        dimension: int,
        evaluator: Callable[[Vector], compact_set],
        local_bound: Optional[Callable[[Vector, float], float]] = None,
        bound_samples: int = 5,
    ):
        """Constructor.

        Parameters
        ----------
        dimension : int
            Ambient dimension n.
        evaluator : Callable[[Vector], compact_set]
            Rule x -> F(x). Must be deterministic.
        local_bound : Optional[Callable[[Vector, float], float]]
            Rule (center, radius) -> bound on ‖F(y)‖ over the ball. When
            omitted the bound is estimated by sampling the ball.
        bound_samples : int
            Lattice points per axis used by the sampled bound.

        """
        if dimension < 1:
            raise ValueError("dimension must be at least 1")
        self.dimension = int(dimension)
        self._evaluator = evaluator
        self._local_bound = local_bound
        self.bound_samples = bound_samples

    def eval(self, x) -> compact_set:
        x = as_vector(x)
        if x.shape[0] != self.dimension:
            raise DimensionMismatch(
                f"map of dimension {self.dimension} evaluated at a point of dimension {x.shape[0]}"
            )
        value = self._evaluator(x)
        if not isinstance(value, compact_set):
            value = compact_set(value)
        if len(value) == 0:
            raise EmptySetError(f"F({x.tolist()}) is empty")
        if value.dimension != self.dimension:
            raise DimensionMismatch(
                f"F({x.tolist()}) has dimension {value.dimension}, expected {self.dimension}"
            )
        return value

    __call__ = eval

    def local_bound(self, center, radius: float) -> float:
        """Bound on ‖F(y)‖ for |y - center| <= radius."""
        center = as_vector(center)
        if self._local_bound is not None:
            return float(self._local_bound(center, radius))
        points = [
            y
            for y in sample_grid(
                (center - radius, center + radius), [self.bound_samples] * self.dimension
            )
            if np.linalg.norm(y - center) <= radius
        ]
        points.append(center)
        return max(self.eval(y).norm() for y in points)

    def parameters(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} has no serializable description")

    def describe(self) -> dict:
        return dict(kind=self.kind, parameters=self.parameters())

    def __repr__(self):
        return f"{type(self).__name__}(dimension={self.dimension})"


def sample_grid(
    box: Tuple[Sequence[float], Sequence[float]], counts: Iterable[int]
) -> List[Vector]:
    """Regular lattice over a box, both endpoints included on every axis.

    Parameters
    ----------
    box : Tuple[Sequence[float], Sequence[float]]
        `(low, high)` corners.
    counts : Iterable[int]
        Points per axis. A count of 1 places the single point at `low`.

    Returns
    -------
    List[Vector]
        `prod(counts)` points, first axis varying slowest.

    """
    low, high = as_vector(box[0]), as_vector(box[1])
    counts = [int(c) for c in counts]
    if low.shape != high.shape or len(counts) != low.shape[0]:
        raise DimensionMismatch("box corners and counts must share one dimension")
    if np.any(low > high):
        raise ValueError(f"inverted box: low={low.tolist()} high={high.tolist()}")
    if any(c < 1 for c in counts):
        raise ValueError("every axis needs at least one point")
    axes = [
        np.linspace(lo, hi, count) if count > 1 else np.array([lo])
        for lo, hi, count in zip(low, high, counts)
    ]
    return [as_vector(point) for point in itertools.product(*axes)]


def closed_graph_check(
    map: set_valued_map,
    x,
    directions: Iterable,
    depth: int = 40,
    tol: float = 1e-9,
) -> Tuple[bool, float]:
    """Sampled closed-graph diagnostic at `x`.

    Along every direction `d` the sequence x_k = x + 2**-k d converges to
    `x`; the values at the tail term stand in for the limits v of
    v_k ∈ F(x_k). A closed graph needs every such v within `tol` of F(x).
    This is evidence, never a proof of upper semicontinuity.

    Returns
    -------
    Tuple[bool, float]
        The verdict and the worst distance seen.

    """
    x = as_vector(x)
    target = map.eval(x)
    worst = 0.0
    for d in directions:
        d = as_vector(d)
        tail = x + 2.0 ** (-depth) * d
        for v in map.eval(tail):
            worst = max(worst, dist_to_set(v, target))
    logger.debug("closed-graph check at %s: worst distance %r", x.tolist(), worst)
    return worst <= tol, worst
