import logging
import operator
from typing import List, Sequence, Tuple, Union

from wcm_inclusion.exceptions import DimensionMismatch, RegionError
from wcm_inclusion.geometry import Vector, as_vector, compact_set, inner
from wcm_inclusion.setmaps.set_valued_map import set_valued_map

logger = logging.getLogger(__name__)


class half_space:
    """The predicate <normal, x> `relation` offset."""

    relations = {
        "<": operator.lt,
        "<=": operator.le,
        "==": operator.eq,
        ">=": operator.ge,
        ">": operator.gt,
    }

    def __init__(self, normal, relation: str, offset: float = 0.0):
        if relation not in half_space.relations:
            raise ValueError(
                f"unknown relation {relation!r}, expected one of {sorted(half_space.relations)}"
            )
        self.normal = as_vector(normal)
        self.relation = relation
        self.offset = float(offset)

    def contains(self, x: Vector) -> bool:
        return half_space.relations[self.relation](inner(self.normal, x), self.offset)

    @classmethod
    def from_dict(cls, data: dict) -> "half_space":
        return cls(data["normal"], data["relation"], data.get("offset", 0.0))

    def to_dict(self) -> dict:
        return dict(normal=self.normal.tolist(), relation=self.relation, offset=self.offset)


class region:
    """A conjunction of half-space predicates; no predicates means everywhere."""

    def __init__(self, where: Sequence[Union[half_space, dict]], values: Union[compact_set, list]):
        self.where = [w if isinstance(w, half_space) else half_space.from_dict(w) for w in where]
        self.values = values if isinstance(values, compact_set) else compact_set(values)

    def contains(self, x: Vector) -> bool:
        return all(w.contains(x) for w in self.where)

    def to_dict(self) -> dict:
        return dict(where=[w.to_dict() for w in self.where], values=self.values.to_list())


class table_map(set_valued_map):
    """Piecewise-constant map given by regions; the first matching region wins."""

    kind = "table"

    def __init__(self, regions: Sequence[Union[region, Tuple, dict]]):
        self.regions: List[region] = []
        for entry in regions:
            if isinstance(entry, region):
                self.regions.append(entry)
            elif isinstance(entry, dict):
                self.regions.append(region(entry.get("where", []), entry["values"]))
            else:
                where, values = entry
                self.regions.append(region(where, values))
        if not self.regions:
            raise ValueError("table_map needs at least one region")
        dimension = self.regions[0].values.dimension
        for r in self.regions:
            if r.values.dimension != dimension or any(
                w.normal.shape[0] != dimension for w in r.where
            ):
                raise DimensionMismatch("all regions of a table_map must share one dimension")
        bound = max(r.values.norm() for r in self.regions)
        super().__init__(
            dimension,
            evaluator=self._lookup,
            local_bound=lambda center, radius: bound,
        )

    def _lookup(self, x: Vector) -> compact_set:
        for index, r in enumerate(self.regions):
            if r.contains(x):
                logger.debug("x=%s matched region %d", x.tolist(), index)
                return r.values
        raise RegionError(f"no region of the table covers x={x.tolist()}")

    @classmethod
    def from_parameters(cls, parameters: dict) -> "table_map":
        return cls(parameters["regions"])

    def parameters(self) -> dict:
        return dict(regions=[r.to_dict() for r in self.regions])
