import numpy as np

from wcm_inclusion.exceptions import DimensionMismatch, NonFiniteError
from wcm_inclusion.geometry import compact_set
from wcm_inclusion.setmaps.set_valued_map import set_valued_map


class linear_map(set_valued_map):
    """Single-valued F(x) = {Mx}.

    A rotation by 90 degrees is monotone (its quadratic form vanishes)
    without being cyclic monotone.
    """

    kind = "linear"

    def __init__(self, M):
        M = np.array(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
            raise DimensionMismatch(f"linear_map needs a square matrix, got shape {M.shape}")
        if not np.all(np.isfinite(M)):
            raise NonFiniteError("non-finite matrix entry")
        M.setflags(write=False)
        self.M = M
        operator_norm = float(np.linalg.norm(M, ord=2))
        super().__init__(
            M.shape[0],
            evaluator=lambda x: compact_set([M @ x]),
            local_bound=lambda center, radius: operator_norm
            * (float(np.linalg.norm(center)) + radius),
        )

    @classmethod
    def from_parameters(cls, parameters: dict) -> "linear_map":
        return cls(parameters["matrix"])

    def parameters(self) -> dict:
        return dict(matrix=self.M.tolist())
