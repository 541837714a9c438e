"""Euler polygons for x'(t) ∈ F(x(t)) with cyclic monotone node velocities.

Each step moves x_{k+1} = x_k + (t_{k+1} - t_k) v_k and picks v_{k+1} ∈
F(x_{k+1}) so that the node pairs (x_k, v_k) stay a CM sequence anchored at
(x_0, v_0). The last step is shortened to land exactly on T.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple
from warnings import warn

import numpy as np
import pandas as pd

from wcm_inclusion.cm_engine import (
    candidate_slacks,
    cm_sequence,
    continuation_holds,
    extend_exhaustive,
    extend_inertial,
    extend_support,
    verify_cm,
)
from wcm_inclusion.exceptions import DimensionMismatch, SelectionFailed
from wcm_inclusion.geometry import Vector, as_vector, dist_to_hull, dist_to_set, inner
from wcm_inclusion.setmaps import pl_convex_function, problem_spec, set_valued_map

logger = logging.getLogger(__name__)


class trajectory:
    """Nodes (t_k, x_k, v_k) of an Euler polygon."""

    def __init__(
        self,
        times: Sequence[float],
        states: Sequence,
        velocities: Sequence,
        step: float,
        strategy: str,
    ):
        self.times = np.array(times, dtype=float)
        self.states = np.array(states, dtype=float, ndmin=2)
        self.velocities = np.array(velocities, dtype=float, ndmin=2)
        if not (len(self.times) == len(self.states) == len(self.velocities)):
            raise DimensionMismatch("times, states and velocities need one entry per node")
        if self.states.shape != self.velocities.shape:
            raise DimensionMismatch("states and velocities differ in dimension")
        for arr in (self.times, self.states, self.velocities):
            arr.setflags(write=False)
        self.step = float(step)
        self.strategy = strategy

    @property
    def anchor(self) -> Tuple[Vector, Vector]:
        return self.states[0], self.velocities[0]

    @property
    def dimension(self) -> int:
        return self.states.shape[1]

    def __len__(self) -> int:
        return len(self.times)

    def sequence(self) -> cm_sequence:
        return cm_sequence(zip(self.states, self.velocities))

    def validate(self, map: set_valued_map, tol: float = 1e-9) -> List[str]:
        """Return the broken node invariants; an empty list means none."""
        problems = []
        if self.times[0] != 0.0:
            problems.append("t_0 is not 0")
        for k in range(len(self) - 1):
            dt = self.times[k + 1] - self.times[k]
            if not dt > 0:
                problems.append(f"times do not increase at k={k}")
            if not np.array_equal(self.states[k + 1], self.states[k] + dt * self.velocities[k]):
                problems.append(f"state recursion broken at k={k}")
        for k, (x, v) in enumerate(zip(self.states, self.velocities)):
            if v not in map.eval(x):
                problems.append(f"v_{k} not in F(x_{k})")
        ok, m = verify_cm(self.sequence(), tol)
        if not ok:
            problems.append(f"node sequence violates the CM chain at m={m}")
        return problems

    def to_pandas(self) -> pd.DataFrame:
        columns = {"t": self.times}
        for i in range(self.dimension):
            columns[f"x[{i}]"] = self.states[:, i]
        for i in range(self.dimension):
            columns[f"v[{i}]"] = self.velocities[:, i]
        return pd.DataFrame(columns)

    def to_csv(self, path) -> None:
        self.to_pandas().to_csv(path, index=False)

    def __repr__(self):
        return (
            f"trajectory(nodes={len(self)}, h={self.step}, strategy={self.strategy!r}, "
            f"final={self.states[-1].tolist()})"
        )


def time_nodes(horizon: float, step: float) -> np.ndarray:
    """0, h, 2h, ... with the last node exactly at T."""
    ratio = horizon / step
    nearest = round(ratio)
    count = int(nearest) if abs(ratio - nearest) <= 1e-9 * max(ratio, 1.0) else math.ceil(ratio)
    count = max(count, 1)
    times = np.arange(count + 1, dtype=float) * step
    times[-1] = horizon
    return times


def _select(
    strategy: str, seq: cm_sequence, x_next: Vector, map: set_valued_map, tol: float
) -> Optional[Vector]:
    if strategy == "support":
        v = extend_support(seq, x_next, map)
        if continuation_holds(seq, x_next, v, tol):
            return v
        logger.debug("support pick %s breaks the chain, falling back to exhaustive", v.tolist())
    elif strategy == "inertial":
        v = extend_inertial(seq, x_next, map, tol)
        if v is not None:
            return v
        logger.debug("no inertial candidate at %s, falling back to exhaustive", x_next.tolist())
    return extend_exhaustive(seq, x_next, map, tol)


def euler_solve(spec: problem_spec) -> trajectory:
    """Integrate the inclusion of `spec` by an Euler polygon.

    Parameters
    ----------
    spec : problem_spec
        The validated problem; its strategy picks the velocity selection:
        'exhaustive', 'support' (verified, exhaustive fallback) or
        'inertial' (exhaustive fallback).

    Returns
    -------
    trajectory
        Nodes whose velocities lie in F and form a CM sequence.

    Raises
    ------
    SelectionFailed
        When no velocity of F(x_k) keeps the node sequence CM.

    """
    times = time_nodes(spec.horizon, spec.step)
    seq = cm_sequence([(spec.x0, spec.v0)])
    x, v = spec.x0, spec.v0
    for k in range(len(times) - 1):
        dt = times[k + 1] - times[k]
        x = as_vector(x + dt * v)
        chosen = _select(spec.strategy, seq, x, spec.map, spec.tol)
        if chosen is None:
            slacks = candidate_slacks(seq, x, spec.map.eval(x))
            raise SelectionFailed(k + 1, x, seq, slacks)
        v = as_vector(chosen)
        seq = seq.append(x, v)
    logger.info(
        "solved %d steps with strategy %s, final state %s",
        len(times) - 1,
        spec.strategy,
        x.tolist(),
    )
    return trajectory(times, seq.x, seq.v, spec.step, spec.strategy)


def suggest_horizon(map: set_valued_map, x0, radius: float) -> float:
    """Heuristic horizon r / M, M the local bound of F on the ball of radius r.

    Only reported; the solver never applies it.
    """
    bound = map.local_bound(as_vector(x0), radius)
    return math.inf if bound == 0 else radius / bound


def trajectory_residual(
    traj: trajectory, map: set_valued_map, hull_tol: float = 1e-9
) -> Tuple[float, float]:
    """(max_k dist(v_k, F(x_k)), max_k dist(v_k, conv F(x_k))).

    `hull_tol` is the accuracy of the hull distance and must be positive; it is
    independent of the slack tolerance of the CM checks, which may be 0.
    """
    node, hull = 0.0, 0.0
    for x, v in zip(traj.states, traj.velocities):
        values = map.eval(x)
        node = max(node, dist_to_set(v, values))
        hull = max(hull, dist_to_hull(v, values, hull_tol))
    return node, hull


def trajectory_cm_check(traj: trajectory, tol: float = 1e-9) -> Tuple[bool, Optional[int]]:
    return verify_cm(traj.sequence(), tol)


def _check_pl(traj: trajectory, f: pl_convex_function):
    if traj.dimension != f.dimension:
        raise DimensionMismatch(
            f"trajectory of dimension {traj.dimension}, function of dimension {f.dimension}"
        )
    slopes = {tuple(a) for a in f.slopes.tolist()}
    for k, v in enumerate(traj.velocities):
        if tuple(v.tolist()) not in slopes:
            raise ValueError(f"velocity v_{k}={v.tolist()} is not a slope of f")


def lyapunov_check(traj: trajectory, f: pl_convex_function, tol: float = 1e-9) -> bool:
    """f(x_{k+1}) >= f(x_k) - tol * h along the polygon."""
    _check_pl(traj, f)
    values = [f(x) for x in traj.states]
    for k in range(len(values) - 1):
        if not values[k + 1] >= values[k] - tol * traj.step:
            logger.debug("potential decreases at k=%d: %r -> %r", k, values[k], values[k + 1])
            return False
    return True


def subgradient_growth_check(traj: trajectory, f: pl_convex_function, tol: float = 1e-9) -> bool:
    """f(x_{k+1}) >= f(x_k) + (t_{k+1} - t_k) |v_k|^2 - tol at every step."""
    _check_pl(traj, f)
    for k in range(len(traj) - 1):
        dt = traj.times[k + 1] - traj.times[k]
        v = traj.velocities[k]
        gain = dt * inner(v, v)
        if not f(traj.states[k + 1]) >= f(traj.states[k]) + gain - tol:
            return False
    return True


def sup_distance(coarse: trajectory, fine: trajectory) -> float:
    """Sup-distance of two polygons on [0, T], compared on the union of their nodes."""
    grid = np.union1d(coarse.times, fine.times)
    a = np.column_stack(
        [np.interp(grid, coarse.times, coarse.states[:, i]) for i in range(coarse.dimension)]
    )
    b = np.column_stack(
        [np.interp(grid, fine.times, fine.states[:, i]) for i in range(fine.dimension)]
    )
    return float(np.max(np.linalg.norm(a - b, axis=1)))


def refine_study(spec: problem_spec, step_counts: Sequence[int]) -> pd.DataFrame:
    """Solve with h = T / N for each N and compare consecutive polygons.

    Parameters
    ----------
    spec : problem_spec
        The problem; its own step is ignored.
    step_counts : Sequence[int]
        Increasing step counts, each dividing the next.

    Returns
    -------
    pd.DataFrame
        One row per count: `steps`, `h`, `sup_distance` (to the previous,
        coarser polygon; NaN on the first row), `node_residual`,
        `hull_residual`, `cm_verdict`.

    """
    step_counts = [int(n) for n in step_counts]
    if not step_counts or any(n < 1 for n in step_counts):
        raise ValueError("step counts must be positive")
    if any(b <= a or b % a for a, b in zip(step_counts, step_counts[1:])):
        raise ValueError("step counts must increase and each must divide the next")
    if len(step_counts) == 1:
        warn("A refinement study with one step count has no distances to report.")

    rows, previous = [], None
    for n in step_counts:
        run = spec.replace(step=spec.horizon / n)
        try:
            traj = euler_solve(run)
        except SelectionFailed as e:
            logger.error("refinement run with %d steps failed at step %d", n, e.step)
            e.step_count = n
            raise
        node, hull = trajectory_residual(traj, spec.map)
        ok, _ = trajectory_cm_check(traj, spec.tol)
        rows.append(
            dict(
                steps=n,
                h=run.step,
                sup_distance=math.nan if previous is None else sup_distance(previous, traj),
                node_residual=node,
                hull_residual=hull,
                cm_verdict=ok,
            )
        )
        previous = traj
    columns = ["steps", "h", "sup_distance", "node_residual", "hull_residual", "cm_verdict"]
    return pd.DataFrame(rows, columns=columns)
