import json
import logging
from typing import List, Optional, Sequence

from wcm_inclusion.exceptions import ProblemParseError, ProblemValidationError
from wcm_inclusion.geometry import Vector, as_vector
from wcm_inclusion.setmaps.constant_map import constant_map
from wcm_inclusion.setmaps.linear_map import linear_map
from wcm_inclusion.setmaps.pl_subdifferential_map import pl_subdifferential_map
from wcm_inclusion.setmaps.set_valued_map import sample_grid, set_valued_map
from wcm_inclusion.setmaps.table_map import table_map

logger = logging.getLogger(__name__)

map_kinds = {
    cls.kind: cls for cls in (constant_map, pl_subdifferential_map, linear_map, table_map)
}

strategies = ("exhaustive", "support", "inertial")

families = ("trivial", "trajectory")


def build_map(description: dict) -> set_valued_map:
    """Instantiate a built-in map from its `{kind, parameters}` description."""
    if not isinstance(description, dict) or "kind" not in description:
        raise ProblemParseError("map description needs a 'kind'", field="map.kind")
    kind = description["kind"]
    if kind not in map_kinds:
        raise ProblemParseError(
            f"unknown map kind {kind!r}, expected one of {sorted(map_kinds)}",
            field="map.kind",
        )
    try:
        return map_kinds[kind].from_parameters(description.get("parameters", {}))
    except KeyError as e:
        raise ProblemParseError(f"missing map parameter {e}", field=f"map.parameters.{e.args[0]}")
    except (TypeError, ValueError) as e:
        raise ProblemParseError(f"malformed {kind} map: {e}", field="map.parameters")


def _int_list(values) -> List[int]:
    return [int(n) for n in values]


def _vector_list(values) -> List[Vector]:
    return [as_vector(p) for p in values]


def _coerce(field: str, convert, value):
    try:
        return convert(value)
    except (TypeError, ValueError) as e:
        raise ProblemParseError(f"malformed value {value!r}: {e}", field=field)


class problem_spec:
    """A validated differential-inclusion problem: F, x0, v0 ∈ F(x0), T, h."""

    def __init__(
        self,
        map: set_valued_map,
        x0,
        v0,
        horizon: float,
        step: float,
        strategy: str = "inertial",
        tol: float = 1e-9,
        grid: Optional[dict] = None,
        max_length: int = 2,
        steps: Optional[Sequence[int]] = None,
        probes: Optional[Sequence] = None,
        family: str = "trajectory",
    ):
        """Constructor; raises `ProblemValidationError` naming the violated rule.

        Parameters
        ----------
        map : set_valued_map
            Right-hand side F.
        x0, v0 :
            Initial state and initial velocity; v0 must lie in F(x0).
        horizon : float
            T > 0.
        step : float
            h with 0 < h <= T.
        strategy : str
            Velocity selection: 'exhaustive', 'support' or 'inertial'.
        tol : float
            Slack tolerance of all CM checks, >= 0.
        grid : Optional[dict]
            `{low, high, counts}` sampling box for classify and potential.
        max_length : int
            Chain length L for the classifiers.
        steps : Optional[Sequence[int]]
            Step counts for refinement studies.
        probes : Optional[Sequence]
            Explicit probe points for the potential; defaults to the grid.
        family : str
            'trivial' or 'trajectory': how the potential family is grown.

        """
        self.map = map
        self.x0 = _coerce("x0", as_vector, x0)
        self.v0 = _coerce("v0", as_vector, v0)
        self.horizon = _coerce("T", float, horizon)
        self.step = _coerce("h", float, step)
        self.strategy = strategy
        self.tol = _coerce("tol", float, tol)
        self.grid = grid
        self.max_length = _coerce("max_length", int, max_length)
        self.steps = None if steps is None else _coerce("steps", _int_list, steps)
        self.probes = None if probes is None else _coerce("probes", _vector_list, probes)
        self.family = family
        self.validate()

    def validate(self):
        if self.x0.shape[0] != self.map.dimension:
            raise ProblemValidationError("x0 dimension does not match the map", field="x0")
        if self.v0.shape[0] != self.map.dimension:
            raise ProblemValidationError("v0 dimension does not match the map", field="v0")
        if not self.horizon > 0:
            raise ProblemValidationError("horizon must be positive", field="T")
        if not 0 < self.step <= self.horizon:
            raise ProblemValidationError("step must satisfy 0 < h <= T", field="h")
        if not self.tol >= 0:
            raise ProblemValidationError("tolerance must be non-negative", field="tol")
        if self.strategy not in strategies:
            raise ProblemValidationError(
                f"strategy must be one of {list(strategies)}", field="strategy"
            )
        if self.family not in families:
            raise ProblemValidationError(f"family must be one of {list(families)}", field="family")
        if self.max_length < 1:
            raise ProblemValidationError("max_length must be at least 1", field="max_length")
        if self.steps is not None:
            if not self.steps or any(n < 1 for n in self.steps):
                raise ProblemValidationError("step counts must be positive", field="steps")
            if any(b <= a or b % a for a, b in zip(self.steps, self.steps[1:])):
                raise ProblemValidationError(
                    "step counts must increase and each must divide the next", field="steps"
                )
        if self.grid is not None:
            try:
                self.samples()
            except (KeyError, TypeError, ValueError) as e:
                raise ProblemValidationError(f"invalid sampling grid: {e}", field="grid")
        try:
            initial = self.map.eval(self.x0)
        except (LookupError, ValueError) as e:
            raise ProblemValidationError(f"F(x0) cannot be evaluated: {e}", field="x0")
        if self.v0 not in initial:
            raise ProblemValidationError("initial velocity not in F(x0)", field="v0")

    def samples(self) -> List[Vector]:
        """The sampling grid, or the single point x0 when no grid is given."""
        if self.grid is None:
            return [self.x0]
        return sample_grid((self.grid["low"], self.grid["high"]), self.grid["counts"])

    def box(self):
        """Corners of the working box: the grid box, or the degenerate box at x0."""
        if self.grid is None:
            return self.x0, self.x0
        return as_vector(self.grid["low"]), as_vector(self.grid["high"])

    def replace(self, **fields) -> "problem_spec":
        current = dict(
            map=self.map,
            x0=self.x0,
            v0=self.v0,
            horizon=self.horizon,
            step=self.step,
            strategy=self.strategy,
            tol=self.tol,
            grid=self.grid,
            max_length=self.max_length,
            steps=self.steps,
            probes=self.probes,
            family=self.family,
        )
        current.update(fields)
        return problem_spec(**current)

    def settings(self) -> dict:
        """Everything but the map, as plain JSON values."""
        data = dict(
            x0=self.x0.tolist(),
            v0=self.v0.tolist(),
            T=self.horizon,
            h=self.step,
            strategy=self.strategy,
            tol=self.tol,
            max_length=self.max_length,
            family=self.family,
        )
        if self.grid is not None:
            data["grid"] = dict(
                low=as_vector(self.grid["low"]).tolist(),
                high=as_vector(self.grid["high"]).tolist(),
                counts=[int(c) for c in self.grid["counts"]],
            )
        if self.steps is not None:
            data["steps"] = list(self.steps)
        if self.probes is not None:
            data["probes"] = [p.tolist() for p in self.probes]
        return data

    def to_dict(self) -> dict:
        """Serializable form; only built-in map kinds have a description."""
        return dict(self.settings(), map=self.map.describe())

    def to_document(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, problem_spec):
            return NotImplemented
        if self.map is not other.map:
            try:
                if self.map.describe() != other.map.describe():
                    return False
            except NotImplementedError:
                # maps without a description only equal themselves
                return False
        return self.settings() == other.settings()

    def __repr__(self):
        return f"problem_spec(map={self.map!r}, {self.settings()!r})"


_required = ("map", "x0", "v0", "T", "h")


def parse_problem(text: str) -> problem_spec:
    """Parse and validate a JSON problem document.

    Parameters
    ----------
    text : str
        The document. Required fields are `map{kind, parameters}`, `x0`,
        `v0`, `T`, `h`; optional ones are `strategy`, `tol`, `grid`,
        `max_length`, `steps`, `probes` and `family`.

    Returns
    -------
    problem_spec
        The validated spec.

    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemParseError(f"malformed JSON: {e.msg}", line=e.lineno)
    if not isinstance(data, dict):
        raise ProblemParseError("problem document must be a JSON object")
    for field in _required:
        if field not in data:
            raise ProblemParseError("missing required field", field=field)

    problem_map = build_map(data["map"])
    try:
        x0 = as_vector(data["x0"])
        v0 = as_vector(data["v0"])
    except (TypeError, ValueError) as e:
        raise ProblemParseError(f"malformed vector: {e}", field="x0/v0")
    for field in ("T", "h", "tol"):
        if field in data and not isinstance(data[field], (int, float)):
            raise ProblemParseError("expected a number", field=field)

    logger.debug("parsed %s problem in dimension %d", problem_map.kind, problem_map.dimension)
    return problem_spec(
        problem_map,
        x0,
        v0,
        horizon=data["T"],
        step=data["h"],
        strategy=data.get("strategy", "inertial"),
        tol=data.get("tol", 1e-9),
        grid=data.get("grid"),
        max_length=data.get("max_length", 2),
        steps=data.get("steps"),
        probes=data.get("probes"),
        family=data.get("family", "trajectory"),
    )
