"""Finite-family convex potential g and cyclic monotone submap G.

g(x) is the supremum over CM sequences S anchored at (x_0, v_0) of the
affine functions g(S, x) = <x - x_k, v_k> + s_k. A `sequence_family` holds
finitely many such sequences, so `g_lower` is a convex piecewise-affine lower
bound of g that can only grow as the family grows, and `membership_G`
accepts a superset of the points of G(x).
"""
import itertools
import json
import logging
from typing import Iterable, List, Optional, Sequence, Tuple
from warnings import warn

import numpy as np

from wcm_inclusion.cm_engine import cm_sequence, verify_cm
from wcm_inclusion.exceptions import AnchorMismatch, DimensionMismatch, NotCMError, NotInValueSet
from wcm_inclusion.geometry import Vector, as_vector, inner, nearest_point, support_argmax
from wcm_inclusion.setmaps import set_valued_map

logger = logging.getLogger(__name__)


class sequence_family:
    """Finitely many CM sequences sharing the anchor (x_0, v_0).

    The trivial one-pair sequence is always a member. Families are values:
    `grow_family` returns a new family.
    """

    def __init__(
        self,
        x0,
        v0,
        members: Optional[Sequence[cm_sequence]] = None,
        box: Optional[Tuple] = None,
        cap: int = 4096,
        tol: float = 1e-9,
    ):
        """Constructor.

        Parameters
        ----------
        x0, v0 :
            The anchor pair.
        members : Optional[Sequence[cm_sequence]]
            Members in insertion order; the trivial sequence is prepended
            when missing.
        box : Optional[Tuple]
            `(low, high)` working box used by dominance pruning. Without a
            box nothing is pruned.
        cap : int
            Maximum number of members.
        tol : float
            Tolerance members are verified with.

        """
        self.x0 = as_vector(x0)
        self.v0 = as_vector(v0)
        if self.x0.shape != self.v0.shape:
            raise DimensionMismatch("anchor state and velocity differ in dimension")
        self.box = None if box is None else (as_vector(box[0]), as_vector(box[1]))
        self.cap = int(cap)
        self.tol = tol
        self.trivial = cm_sequence([(self.x0, self.v0)])
        members = list(members or [])
        if not any(m == self.trivial for m in members):
            members.insert(0, self.trivial)
        self.members: Tuple[cm_sequence, ...] = tuple(members)

    @property
    def anchor(self) -> Tuple[Vector, Vector]:
        return self.x0, self.v0

    @property
    def dimension(self) -> int:
        return self.x0.shape[0]

    def __len__(self) -> int:
        return len(self.members)

    def best_member(self, x) -> cm_sequence:
        """The oldest member attaining g_lower at `x`."""
        x = as_vector(x)
        values = [g_of_sequence(S, x) for S in self.members]
        return self.members[int(np.argmax(values))]

    def vertices(self) -> List[Vector]:
        low, high = self.box
        return [as_vector(v) for v in itertools.product(*zip(low, high))]

    def _with_members(self, members: Sequence[cm_sequence]) -> "sequence_family":
        return sequence_family(
            self.x0, self.v0, members=members, box=self.box, cap=self.cap, tol=self.tol
        )

    def to_dict(self) -> dict:
        return dict(
            anchor=dict(x0=self.x0.tolist(), v0=self.v0.tolist()),
            box=None if self.box is None else [c.tolist() for c in self.box],
            cap=self.cap,
            tol=self.tol,
            members=[S.to_dict() for S in self.members],
        )

    @classmethod
    def from_dict(cls, data: dict) -> "sequence_family":
        family = cls(
            data["anchor"]["x0"],
            data["anchor"]["v0"],
            box=data.get("box"),
            cap=data.get("cap", 4096),
            tol=data.get("tol", 1e-9),
        )
        for member in data["members"]:
            family = grow_family(family, cm_sequence.from_dict(member))
        return family

    def to_document(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def __repr__(self):
        anchor = (self.x0.tolist(), self.v0.tolist())
        return f"sequence_family(anchor={anchor}, members={len(self)})"


def g_of_sequence(S: cm_sequence, x) -> float:
    """The affine function <x - x_k, v_k> + s_k of the sequence `S`.

    Evaluated as <x - x_0, v_k> - max(slack_k, 0), the same function when
    the final slack is non-negative. A slack admitted within -tol is read as
    0, so g(S, x_0) <= 0 holds exactly in floating point.
    """
    x = as_vector(x)
    if x.shape[0] != S.dimension:
        raise DimensionMismatch(f"point of dimension {x.shape[0]}, sequence of {S.dimension}")
    x0, _ = S.anchor
    _, v_k = S.last
    return inner(x - x0, v_k) - max(S.slack(S.k), 0.0)


def g_lower(fam: sequence_family, x) -> float:
    return max(g_of_sequence(S, x) for S in fam.members)


def _g_anchor_selection(fam: sequence_family, values, x: Vector) -> Vector:
    direction = x - fam.x0
    if not np.any(direction):
        return nearest_point(values, fam.v0)
    return support_argmax(values, direction)


def select_G(
    fam: sequence_family, map: set_valued_map, x, tol: float = 1e-9
) -> Optional[Vector]:
    """Support-maximizer selection of G(x) relative to the family.

    Returns
    -------
    Optional[Vector]
        v* = argmax of <x - x_0, .> over F(x) when it clears g_lower(x),
        otherwise `None`.

    """
    x = as_vector(x)
    values = map.eval(x)
    v_star = _g_anchor_selection(fam, values, x)
    if inner(x - fam.x0, v_star) >= g_lower(fam, x) - tol:
        return v_star
    logger.debug("select_G rejects x=%s: support value below g_lower", x.tolist())
    return None


def membership_G(fam: sequence_family, map: set_valued_map, x, v, tol: float = 1e-9) -> bool:
    """Whether v ∈ F(x) clears <x - x_0, v> >= g_lower(x) - tol.

    A finite family makes this necessary but not sufficient for membership
    in the exact G(x): growing the family can only shrink the accepted set.
    """
    x, v = as_vector(x), as_vector(v)
    if v not in map.eval(x):
        raise NotInValueSet(f"v={v.tolist()} is not in F({x.tolist()})")
    return inner(x - fam.x0, v) >= g_lower(fam, x) - tol


def _dominated(values: np.ndarray, others: np.ndarray) -> bool:
    """Whether some row of `others` is >= `values` everywhere and > somewhere."""
    return bool(
        np.any(np.all(others >= values, axis=1) & np.any(others > values, axis=1))
    )


def grow_family(fam: sequence_family, S: cm_sequence) -> sequence_family:
    """Add `S` and all its prefixes to the family.

    With a working box, a member is dropped when another member is no
    smaller at every box vertex and larger at one of them; affine domination
    on a box is decided at its vertices, so g_lower is unchanged on the box.
    The trivial member is never dropped.
    When the cap is exceeded the oldest dominated members go first.
    """
    x0, v0 = S.anchor
    if not (np.array_equal(x0, fam.x0) and np.array_equal(v0, fam.v0)):
        raise AnchorMismatch(
            f"sequence anchored at ({x0.tolist()}, {v0.tolist()}), family at "
            f"({fam.x0.tolist()}, {fam.v0.tolist()})"
        )
    ok, m = verify_cm(S, fam.tol)
    if not ok:
        raise NotCMError(f"sequence violates the CM chain at m={m}")

    members = list(fam.members)
    known = {member.key() for member in members}
    for prefix in S.prefixes():
        if prefix.key() not in known:
            members.append(prefix)
            known.add(prefix.key())

    if fam.box is not None and len(members) > 1:
        vertices = fam.vertices()
        table = np.array([[g_of_sequence(member, y) for y in vertices] for member in members])
        keep = [
            index == 0 or not _dominated(table[index], np.delete(table, index, axis=0))
            for index in range(len(members))
        ]
        dropped = len(members) - sum(keep)
        if dropped:
            logger.debug("dominance pruning dropped %d members", dropped)
        members = [member for member, kept in zip(members, keep) if kept]

    if len(members) > fam.cap:
        members = _evict(fam, members)
    return fam._with_members(members)


def _evict(fam: sequence_family, members: List[cm_sequence]) -> List[cm_sequence]:
    excess = len(members) - fam.cap
    evicted = set()
    if fam.box is not None:
        vertices = fam.vertices()
        table = np.array([[g_of_sequence(member, y) for y in vertices] for member in members])
        for index in range(1, len(members)):
            if len(evicted) == excess:
                break
            others = [j for j in range(len(members)) if j != index and j not in evicted]
            if np.any(np.all(table[others] >= table[index], axis=1)):
                evicted.add(index)
    if len(evicted) < excess:
        warn(
            f"Family cap {fam.cap} forces eviction of non-dominated members; "
            f"g_lower may decrease."
        )
        for index in range(1, len(members)):
            if len(evicted) == excess:
                break
            evicted.add(index)
    logger.debug("family cap %d evicted %d members", fam.cap, len(evicted))
    return [member for index, member in enumerate(members) if index not in evicted]


def subgradient_test(
    fam: sequence_family,
    x,
    v,
    probes: Iterable,
    tol: float = 1e-9,
    map: Optional[set_valued_map] = None,
) -> bool:
    """Finite-family subgradient inequality for an accepted pair (x, v).

    The best member at `x` is extended by (x, v); the family with that
    extension added must then satisfy
    g_lower(fam', y) >= g_lower(fam, x) + <v, y - x> - tol at every probe.
    The construction guarantees it, so a `False` points at a bug.

    Parameters
    ----------
    fam : sequence_family
        The family.
    x, v :
        The pair; v must clear the G(x) threshold of the family.
    probes : Iterable
        Points y at which the inequality is checked.
    tol : float
        Tolerance.
    map : Optional[set_valued_map]
        When given, v ∈ F(x) is checked as well.

    Returns
    -------
    bool
        The verdict.

    """
    x, v = as_vector(x), as_vector(v)
    if map is not None and v not in map.eval(x):
        raise NotInValueSet(f"v={v.tolist()} is not in F({x.tolist()})")
    g_x = g_lower(fam, x)
    if not inner(x - fam.x0, v) >= g_x - tol:
        raise ValueError("subgradient_test needs a pair accepted by membership_G")

    extended = fam.best_member(x).append(x, v)
    for y in probes:
        y = as_vector(y)
        grown = max(g_lower(fam, y), g_of_sequence(extended, y))
        if not grown >= g_x + inner(v, y - x) - tol:
            logger.warning("subgradient inequality fails at y=%s for x=%s", y.tolist(), x.tolist())
            return False
    return True
