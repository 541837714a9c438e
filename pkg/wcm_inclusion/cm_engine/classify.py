"""Brute-force classification of set-valued maps on finite samples.

Every verdict is relative to the samples, the chain length and the
tolerance it was computed with: `holds` means no counterexample exists among
the enumerated chains, never a global certificate. A `fails` verdict always
carries a witness that `class_report.replay` re-verifies.
"""
import itertools
import json
import logging
from os import getenv
from typing import Iterable, List, Optional, Sequence, Tuple
from warnings import warn

import numpy as np

from wcm_inclusion.cm_engine.cm_sequence import cm_sequence, holds, verify_cm
from wcm_inclusion.cm_engine.extension import continuation_holds, extend_exhaustive
from wcm_inclusion.exceptions import BudgetExceeded
from wcm_inclusion.geometry import Vector, as_vector, inner, support_value
from wcm_inclusion.setmaps import set_valued_map

logger = logging.getLogger(__name__)

DEFAULT_CHAIN_BUDGET = 10**6


def chain_budget(budget: Optional[int] = None) -> int:
    """Explicit budget, else `WCM_CHAIN_BUDGET` from the environment, else 10**6."""
    if budget is not None:
        return int(budget)
    return int(getenv("WCM_CHAIN_BUDGET", DEFAULT_CHAIN_BUDGET))


def _vec(v) -> list:
    return [float(c) for c in v]


class class_report:
    """Outcome of one classification call."""

    classes = ("monotone", "weakly_monotone", "cyclic_monotone", "wcm", "condition4")

    def __init__(
        self,
        class_name: str,
        verdict: str,
        witness: Optional[dict],
        tol: float,
        samples: dict,
        chains: int = 0,
    ):
        if class_name not in class_report.classes:
            raise ValueError(f"unknown class {class_name!r}")
        if verdict not in ("holds", "fails"):
            raise ValueError(f"verdict must be 'holds' or 'fails', got {verdict!r}")
        if verdict == "fails" and witness is None:
            raise ValueError("a fails verdict needs a witness")
        self.class_name = class_name
        self.verdict = verdict
        self.witness = witness
        self.tol = tol
        self.samples = samples
        self.chains = chains

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def replay(self, map: set_valued_map) -> bool:
        """Re-check the witness against `map`; `True` when it still fails the class."""
        if self.witness is None:
            return False
        w = self.witness
        tol = self.tol
        if self.class_name == "monotone":
            x, y, v_x, v_y = (as_vector(w[key]) for key in ("x", "y", "v_x", "v_y"))
            return (
                v_x in map.eval(x)
                and v_y in map.eval(y)
                and not holds(inner(x - y, v_x - v_y), 0.0, tol)
            )
        if self.class_name == "weakly_monotone":
            x, y, v_x = (as_vector(w[key]) for key in ("x", "y", "v_x"))
            return v_x in map.eval(x) and not any(
                holds(inner(x - y, v_x - v_y), 0.0, tol) for v_y in map.eval(y)
            )
        if self.class_name == "cyclic_monotone":
            seq = cm_sequence.from_dict(w["sequence"])
            on_graph = all(v in map.eval(x) for x, v in seq)
            return on_graph and not verify_cm(seq, tol)[0]
        if self.class_name == "wcm":
            seq = cm_sequence.from_dict(w["sequence"])
            on_graph = all(v in map.eval(x) for x, v in seq)
            return (
                on_graph
                and verify_cm(seq, tol)[0]
                and extend_exhaustive(seq, w["x_next"], map, tol) is None
            )
        if self.class_name == "condition4":
            return not _condition4_holds(map, [as_vector(p) for p in w["points"]], tol)
        warn(f"Cannot replay a witness of unknown class {self.class_name}")
        return False

    def to_dict(self) -> dict:
        return dict(
            class_name=self.class_name,
            verdict=self.verdict,
            witness=self.witness,
            tol=self.tol,
            samples=self.samples,
            chains=self.chains,
        )

    @classmethod
    def from_dict(cls, data: dict) -> "class_report":
        return cls(
            data["class_name"],
            data["verdict"],
            data.get("witness"),
            data["tol"],
            data.get("samples", {}),
            data.get("chains", 0),
        )

    def to_document(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def __repr__(self):
        return f"class_report({self.class_name}: {self.verdict})"


def _describe(samples: Sequence[Vector], **extra) -> dict:
    points = np.array(samples)
    return dict(
        count=len(samples),
        low=points.min(axis=0).tolist(),
        high=points.max(axis=0).tolist(),
        **extra,
    )


def _graph(map: set_valued_map, samples: Sequence[Vector]) -> List[Tuple[Vector, Vector]]:
    return [(x, v) for x in samples for v in map.eval(x)]


def _check_samples(samples) -> List[Vector]:
    samples = [as_vector(x) for x in samples]
    if not samples:
        raise ValueError("classification needs at least one sample point")
    return samples


class _budget_counter:
    def __init__(self, budget: int):
        self.budget = budget
        self.count = 0

    def tick(self, n: int = 1):
        self.count += n
        if self.count > self.budget:
            raise BudgetExceeded(self.count, self.budget)


def classify_monotone(
    map: set_valued_map, samples: Iterable, tol: float = 1e-9, budget: Optional[int] = None
) -> class_report:
    """<x - y, v_x - v_y> >= -tol for all sample pairs and all value combinations."""
    samples = _check_samples(samples)
    graph = _graph(map, samples)
    counter = _budget_counter(chain_budget(budget))
    if len(graph) ** 2 > counter.budget:
        raise BudgetExceeded(len(graph) ** 2, counter.budget)
    descriptor = _describe(samples)
    for (x, v_x), (y, v_y) in itertools.combinations(graph, 2):
        counter.tick()
        if not holds(inner(x - y, v_x - v_y), 0.0, tol):
            witness = dict(x=_vec(x), y=_vec(y), v_x=_vec(v_x), v_y=_vec(v_y))
            return class_report("monotone", "fails", witness, tol, descriptor, counter.count)
    return class_report("monotone", "holds", None, tol, descriptor, counter.count)


def classify_weakly_monotone(
    map: set_valued_map, samples: Iterable, tol: float = 1e-9, budget: Optional[int] = None
) -> class_report:
    """For all x, y and every v_x ∈ F(x) some v_y ∈ F(y) with <x - y, v_x - v_y> >= -tol."""
    samples = _check_samples(samples)
    values = [map.eval(x) for x in samples]
    counter = _budget_counter(chain_budget(budget))
    descriptor = _describe(samples)
    for (x, F_x), (y, F_y) in itertools.product(zip(samples, values), repeat=2):
        for v_x in F_x:
            counter.tick(len(F_y))
            if not any(holds(inner(x - y, v_x - v_y), 0.0, tol) for v_y in F_y):
                witness = dict(x=_vec(x), y=_vec(y), v_x=_vec(v_x))
                return class_report(
                    "weakly_monotone", "fails", witness, tol, descriptor, counter.count
                )
    return class_report("weakly_monotone", "holds", None, tol, descriptor, counter.count)


def classify_cyclic_monotone(
    map: set_valued_map,
    samples: Iterable,
    L: int = 2,
    tol: float = 1e-9,
    budget: Optional[int] = None,
) -> class_report:
    """The CM chain at the final index for every graph chain of 2..L+1 pairs.

    Chains are enumerated by increasing length, so the witness returned is
    of minimal length among the sampled chains.
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    samples = _check_samples(samples)
    graph = _graph(map, samples)
    required = sum(len(graph) ** (m + 1) for m in range(1, L + 1))
    counter = _budget_counter(chain_budget(budget))
    if required > counter.budget:
        raise BudgetExceeded(required, counter.budget)
    descriptor = _describe(samples, max_length=L)
    for m in range(1, L + 1):
        for chain in itertools.product(graph, repeat=m + 1):
            counter.tick()
            seq = cm_sequence(chain)
            if not holds(seq.lhs(m), seq.partial_sums[m], tol):
                witness = dict(sequence=seq.to_dict())
                logger.info("cyclic monotonicity fails on a chain of %d pairs", m + 1)
                return class_report(
                    "cyclic_monotone", "fails", witness, tol, descriptor, counter.count
                )
    return class_report("cyclic_monotone", "holds", None, tol, descriptor, counter.count)


def classify_wcm(
    map: set_valued_map,
    samples: Iterable,
    L: int = 2,
    tol: float = 1e-9,
    budget: Optional[int] = None,
) -> class_report:
    """Every sampled CM sequence of at most L pairs continues to every sample.

    CM sequences are grown level by level from every anchor (x_0, v_0) on
    the sampled graph; each level keeps all CM continuations, not just the
    one `extend_exhaustive` would pick.
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    samples = _check_samples(samples)
    values = {x.tobytes(): map.eval(x) for x in samples}
    counter = _budget_counter(chain_budget(budget))
    descriptor = _describe(samples, max_length=L)

    level = [cm_sequence([(x, v)]) for x in samples for v in values[x.tobytes()]]
    for length in range(1, L + 1):
        following = []
        for seq in level:
            for x_next in samples:
                F_next = values[x_next.tobytes()]
                counter.tick(len(F_next))
                feasible = [v for v in F_next if continuation_holds(seq, x_next, v, tol)]
                if not feasible:
                    witness = dict(sequence=seq.to_dict(), x_next=_vec(x_next))
                    return class_report("wcm", "fails", witness, tol, descriptor, counter.count)
                if length < L:
                    following.extend(seq.append(x_next, v) for v in feasible)
        level = following
    return class_report("wcm", "holds", None, tol, descriptor, counter.count)


def _condition4_holds(map: set_valued_map, points: Sequence[Vector], tol: float) -> bool:
    return _condition4_violation(map, points, tol) is None


def _condition4_violation(
    map: set_valued_map, points: Sequence[Vector], tol: float
) -> Optional[int]:
    """First index m at which the support-function chain fails, or `None`."""
    values = [map.eval(x) for x in points]
    x0 = points[0]
    rhs = 0.0
    for m in range(1, len(points)):
        rhs += support_value(values[m - 1], points[m] - points[m - 1])
        lhs = support_value(values[m], points[m] - x0)
        if not holds(lhs, rhs, tol):
            return m
    return None


def check_condition4(
    map: set_valued_map,
    point_sequences: Iterable[Sequence],
    tol: float = 1e-9,
    budget: Optional[int] = None,
) -> class_report:
    """Support-function chain condition on each given point sequence.

    For x_0..x_m the condition reads
    δ*(x_m - x_0, F(x_m)) >= sum_{i=1}^{m} δ*(x_i - x_{i-1}, F(x_{i-1})),
    checked at every m of every sequence. It implies weak cyclic
    monotonicity and makes support selection CM-preserving.
    """
    counter = _budget_counter(chain_budget(budget))
    all_points = []
    count = 0
    for sequence in point_sequences:
        points = [as_vector(p) for p in sequence]
        if len(points) < 2:
            raise ValueError("the support chain condition needs sequences of at least two points")
        all_points.extend(points)
        count += 1
        counter.tick()
        m = _condition4_violation(map, points, tol)
        if m is not None:
            witness = dict(points=[_vec(p) for p in points[: m + 1]])
            descriptor = _describe(all_points, sequences=count)
            return class_report("condition4", "fails", witness, tol, descriptor, counter.count)
    descriptor = _describe(all_points, sequences=count) if all_points else dict(count=0)
    return class_report("condition4", "holds", None, tol, descriptor, counter.count)


def point_sequences(samples: Iterable, L: int = 2) -> Iterable[Tuple[Vector, ...]]:
    """All sample sequences of 2..L+1 points, shortest first."""
    samples = _check_samples(samples)
    for m in range(1, L + 1):
        yield from itertools.product(samples, repeat=m + 1)
