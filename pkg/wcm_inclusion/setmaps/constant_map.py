from typing import Union

import numpy as np

from wcm_inclusion.geometry import compact_set
from wcm_inclusion.setmaps.set_valued_map import set_valued_map


class constant_map(set_valued_map):
    """F(x) ≡ A.

    Weakly cyclic monotone for every A (keep v_m = v_{m-1}), cyclic
    monotone only when A is a singleton.
    """

    kind = "constant"

    def __init__(self, A: Union[compact_set, list, np.ndarray]):
        self.A = A if isinstance(A, compact_set) else compact_set(A)
        norm = self.A.norm()
        super().__init__(
            self.A.dimension,
            evaluator=lambda x: self.A,
            local_bound=lambda center, radius: norm,
        )

    @classmethod
    def from_parameters(cls, parameters: dict) -> "constant_map":
        return cls(compact_set(parameters["points"]))

    def parameters(self) -> dict:
        return dict(points=self.A.to_list())
