"""Continuation of a CM sequence by one more graph pair.

Three selection rules are provided: exhaustive search over F(x_next), the
support-function maximizer in direction x_next - x_0, and the inertial rule
<x_next - x_0, v - v_k> >= 0, which keeps the chain CM by induction.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from wcm_inclusion.cm_engine.cm_sequence import cm_sequence, holds
from wcm_inclusion.exceptions import DimensionMismatch
from wcm_inclusion.geometry import (
    Vector,
    as_vector,
    compact_set,
    inner,
    lex_key,
    nearest_point,
    support_argmax,
)
from wcm_inclusion.setmaps import set_valued_map

logger = logging.getLogger(__name__)


def _prepare(seq: cm_sequence, x_next, map: set_valued_map) -> Tuple[Vector, compact_set]:
    x_next = as_vector(x_next)
    if x_next.shape[0] != seq.dimension or map.dimension != seq.dimension:
        raise DimensionMismatch("sequence, next point and map must share one dimension")
    return x_next, map.eval(x_next)


def continuation_holds(seq: cm_sequence, x_next: Vector, v: Vector, tol: float) -> bool:
    """Whether appending (x_next, v) keeps the chain at the new final index."""
    x0, _ = seq.anchor
    return holds(inner(x_next - x0, v), seq.next_sum(x_next), tol)


def candidate_slacks(seq: cm_sequence, x_next, values: compact_set) -> List[Tuple[Vector, float]]:
    """Slack <x_next - x_0, v> - s_{k+1} of every candidate v, in set order."""
    x_next = as_vector(x_next)
    x0, _ = seq.anchor
    rhs = seq.next_sum(x_next)
    return [(v, inner(x_next - x0, v) - rhs) for v in values]


def extend_exhaustive(
    seq: cm_sequence, x_next, map: set_valued_map, tol: float = 1e-9
) -> Optional[Vector]:
    """Scan all of F(x_next) for a CM-preserving velocity.

    Parameters
    ----------
    seq : cm_sequence
        A CM sequence.
    x_next : Vector
        The next state.
    map : set_valued_map
        The right-hand side F.
    tol : float
        Slack tolerance.

    Returns
    -------
    Optional[Vector]
        The feasible candidate of largest slack (ties lexicographic), or
        `None` when no candidate keeps the chain.

    """
    x_next, values = _prepare(seq, x_next, map)
    feasible = [
        (slack, v)
        for v, slack in candidate_slacks(seq, x_next, values)
        if continuation_holds(seq, x_next, v, tol)
    ]
    if not feasible:
        return None
    best = max(slack for slack, _ in feasible)
    return min((v for slack, v in feasible if slack == best), key=lex_key)


def extend_support(seq: cm_sequence, x_next, map: set_valued_map) -> Vector:
    """Support-function selection in direction x_next - x_0.

    The continuation is guaranteed CM only for maps satisfying the
    support-function chain condition; callers re-verify otherwise. When
    x_next == x_0 the direction is degenerate and the point of F(x_next)
    nearest v_k is returned.
    """
    x_next, values = _prepare(seq, x_next, map)
    x0, _ = seq.anchor
    direction = x_next - x0
    if not np.any(direction):
        return nearest_point(values, seq.last[1])
    return support_argmax(values, direction)


def extend_inertial(
    seq: cm_sequence, x_next, map: set_valued_map, tol: float = 1e-9
) -> Optional[Vector]:
    """Inertial selection: <x_next - x_0, v - v_k> >= -tol, closest to v_k.

    Candidates are ordered by |v - v_k|, ties lexicographic. A candidate
    satisfying the inertial inequality only within `tol` may still break the
    chain once earlier slack is added, so the first candidate that also keeps
    the chain is returned.
    """
    x_next, values = _prepare(seq, x_next, map)
    x0, _ = seq.anchor
    v_k = seq.last[1]
    direction = x_next - x0
    candidates = sorted(
        (v for v in values if inner(direction, v - v_k) >= -tol),
        key=lambda v: (float(np.linalg.norm(v - v_k)), lex_key(v)),
    )
    for v in candidates:
        if continuation_holds(seq, x_next, v, tol):
            return v
        logger.debug("inertial candidate %s rejected by accumulated slack", v.tolist())
    return None
