import logging
from typing import Iterable, Iterator, List, Optional, Tuple

import numpy as np

from wcm_inclusion.exceptions import DimensionMismatch
from wcm_inclusion.geometry import Vector, as_vector, inner

logger = logging.getLogger(__name__)


def holds(lhs: float, rhs: float, tol: float) -> bool:
    """The inequality lhs >= rhs - tol, evaluated the same way everywhere."""
    return lhs >= rhs - tol


class cm_sequence:
    """Ordered graph pairs (x_i, v_i), i = 0..k, with cached partial sums.

    s_m = sum_{i=1}^{m} <x_i - x_{i-1}, v_{i-1}>, s_0 = 0. Instances are
    immutable; `append` returns a new sequence.
    """

    def __init__(self, pairs: Iterable[Tuple], _sums: Optional[List[float]] = None):
        xs, vs = [], []
        for x, v in pairs:
            xs.append(as_vector(x))
            vs.append(as_vector(v))
        if not xs:
            raise ValueError("a CM sequence needs at least the anchor pair")
        dimension = xs[0].shape[0]
        if any(x.shape[0] != dimension for x in xs) or any(v.shape[0] != dimension for v in vs):
            raise DimensionMismatch("all states and velocities of a sequence share one dimension")
        self._x = np.array(xs)
        self._v = np.array(vs)
        self._x.setflags(write=False)
        self._v.setflags(write=False)
        if _sums is None:
            _sums = [0.0]
            for i in range(1, len(xs)):
                _sums.append(_sums[-1] + inner(xs[i] - xs[i - 1], vs[i - 1]))
        self._sums = tuple(_sums)

    @property
    def x(self) -> np.ndarray:
        return self._x

    @property
    def v(self) -> np.ndarray:
        return self._v

    @property
    def partial_sums(self) -> Tuple[float, ...]:
        return self._sums

    @property
    def dimension(self) -> int:
        return self._x.shape[1]

    @property
    def k(self) -> int:
        """Index of the last pair."""
        return len(self._sums) - 1

    @property
    def anchor(self) -> Tuple[Vector, Vector]:
        return self._x[0], self._v[0]

    @property
    def last(self) -> Tuple[Vector, Vector]:
        return self._x[-1], self._v[-1]

    def __len__(self) -> int:
        return len(self._sums)

    def __iter__(self) -> Iterator[Tuple[Vector, Vector]]:
        return zip(self._x, self._v)

    def next_sum(self, x_next) -> float:
        """s_{k+1} for a continuation to `x_next`."""
        x_k, v_k = self.last
        return self._sums[-1] + inner(as_vector(x_next) - x_k, v_k)

    def append(self, x, v) -> "cm_sequence":
        x, v = as_vector(x), as_vector(v)
        if x.shape[0] != self.dimension or v.shape[0] != self.dimension:
            raise DimensionMismatch("appended pair does not match the sequence dimension")
        return cm_sequence(
            list(self) + [(x, v)],
            _sums=list(self._sums) + [self.next_sum(x)],
        )

    def prefix(self, m: int) -> "cm_sequence":
        """The pairs 0..m."""
        if not 0 <= m <= self.k:
            raise IndexError(f"prefix index {m} outside 0..{self.k}")
        return cm_sequence(zip(self._x[: m + 1], self._v[: m + 1]), _sums=self._sums[: m + 1])

    def prefixes(self) -> List["cm_sequence"]:
        return [self.prefix(m) for m in range(self.k + 1)]

    def lhs(self, m: int) -> float:
        """<x_m - x_0, v_m>."""
        return inner(self._x[m] - self._x[0], self._v[m])

    def slack(self, m: int) -> float:
        """lhs(m) - s_m; the chain holds at m when it is >= -tol."""
        return self.lhs(m) - self._sums[m]

    def slacks(self) -> List[float]:
        """slack(m) for m = 1..k."""
        return [self.slack(m) for m in range(1, self.k + 1)]

    def key(self) -> bytes:
        return self._x.tobytes() + b"|" + self._v.tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, cm_sequence):
            return NotImplemented
        return np.array_equal(self._x, other._x) and np.array_equal(self._v, other._v)

    def __hash__(self):
        return hash(self.key())

    def to_dict(self) -> dict:
        return dict(
            x=self._x.tolist(),
            v=self._v.tolist(),
            partial_sums=list(self._sums),
        )

    @classmethod
    def from_dict(cls, data: dict) -> "cm_sequence":
        return cls(zip(data["x"], data["v"]))

    def __repr__(self):
        return f"cm_sequence(k={self.k}, x={self._x.tolist()}, v={self._v.tolist()})"


def verify_cm(seq: cm_sequence, tol: float = 1e-9) -> Tuple[bool, Optional[int]]:
    """Check the cyclic monotonicity chain at every index of `seq`.

    For m = 1..k the sequence needs
    <x_m - x_0, v_m> >= sum_{i=1}^{m} <x_i - x_{i-1}, v_{i-1}> - tol.
    A one-pair sequence is CM by definition.

    Returns
    -------
    Tuple[bool, Optional[int]]
        Verdict and the first violating index m, or `None`.

    """
    for m in range(1, seq.k + 1):
        if not holds(seq.lhs(m), seq.partial_sums[m], tol):
            logger.debug("CM chain violated at m=%d of %d", m, seq.k)
            return False, m
    return True, None
