from typing import List, Optional, Sequence

import numpy as np

from wcm_inclusion.exceptions import DimensionMismatch, EmptySetError, NonFiniteError
from wcm_inclusion.geometry import Vector, as_vector, compact_set, inner
from wcm_inclusion.setmaps.set_valued_map import set_valued_map


class pl_convex_function:
    """f(x) = max_i (<a_i, x> + b_i), convex as a maximum of affine pieces."""

    def __init__(self, slopes, offsets: Optional[Sequence[float]] = None):
        slopes = np.array(slopes, dtype=float)
        if slopes.ndim == 1:
            slopes = slopes.reshape(-1, 1)
        if slopes.ndim != 2 or slopes.shape[0] == 0:
            raise EmptySetError("a piecewise-linear function needs at least one piece")
        offsets = np.zeros(slopes.shape[0]) if offsets is None else np.array(offsets, dtype=float)
        if offsets.shape != (slopes.shape[0],):
            raise DimensionMismatch(
                f"{slopes.shape[0]} slopes but {offsets.size} offsets"
            )
        if not (np.all(np.isfinite(slopes)) and np.all(np.isfinite(offsets))):
            raise NonFiniteError("non-finite piece coefficient")
        slopes.setflags(write=False)
        offsets.setflags(write=False)
        self.slopes = slopes
        self.offsets = offsets

    @property
    def dimension(self) -> int:
        return self.slopes.shape[1]

    def piece_values(self, x) -> List[float]:
        x = as_vector(x)
        if x.shape[0] != self.dimension:
            raise DimensionMismatch(
                f"function of dimension {self.dimension} evaluated at dimension {x.shape[0]}"
            )
        return [inner(a, x) + b for a, b in zip(self.slopes, self.offsets)]

    def __call__(self, x) -> float:
        return max(self.piece_values(x))

    def active_pieces(self, x, activity_tol: float = 1e-12) -> List[int]:
        values = self.piece_values(x)
        top = max(values)
        return [i for i, value in enumerate(values) if value >= top - activity_tol]

    def to_dict(self) -> dict:
        return dict(slopes=self.slopes.tolist(), offsets=self.offsets.tolist())


class pl_subdifferential_map(set_valued_map):
    """F(x) = slopes of the pieces of `f` active at x.

    Every value is a subset of the subdifferential ∂f(x), so the map is
    cyclic monotone; it is also upper semicontinuous.
    """

    kind = "pl_subdifferential"

    def __init__(self, f: pl_convex_function, activity_tol: float = 1e-12):
        self.f = f
        self.activity_tol = activity_tol
        slope_bound = float(np.max(np.linalg.norm(f.slopes, axis=1)))
        super().__init__(
            f.dimension,
            evaluator=self._active_slopes,
            local_bound=lambda center, radius: slope_bound,
        )

    def _active_slopes(self, x: Vector) -> compact_set:
        active = self.f.active_pieces(x, self.activity_tol)
        return compact_set(self.f.slopes[active]).canonical()

    @classmethod
    def from_parameters(cls, parameters: dict) -> "pl_subdifferential_map":
        f = pl_convex_function(parameters["slopes"], parameters.get("offsets"))
        return cls(f, activity_tol=float(parameters.get("activity_tol", 1e-12)))

    def parameters(self) -> dict:
        return dict(self.f.to_dict(), activity_tol=self.activity_tol)
