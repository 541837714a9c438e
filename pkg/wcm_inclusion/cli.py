"""Command-line front end.

    wcm-inclusion solve|classify|potential|refine --input PROBLEM.json --output DIR
        [--tol R] [--strategy NAME] [--grid=LOW:HIGH:COUNT[,...]]
        [--max-length L] [--steps N1,N2,...] [--classes C1,C2,...]
        [--family trivial|trajectory] [-v|-vv|-q]

A grid starting with a minus sign must be passed as `--grid=-1:1:3`.
`WCM_CHAIN_BUDGET` caps the chain evaluations of one classification call.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from wcm_inclusion.cm_engine import (
    check_condition4,
    class_report,
    classify_cyclic_monotone,
    classify_monotone,
    classify_wcm,
    classify_weakly_monotone,
    point_sequences,
)
from wcm_inclusion.exceptions import (
    BudgetExceeded,
    ConvergenceError,
    DimensionMismatch,
    EmptySetError,
    NonFiniteError,
    ProblemParseError,
    ProblemValidationError,
    RegionError,
    SelectionFailed,
)
from wcm_inclusion.potential import (
    g_lower,
    grow_family,
    membership_G,
    select_G,
    sequence_family,
    subgradient_test,
)
from wcm_inclusion.setmaps import parse_problem, problem_spec
from wcm_inclusion.solver import (
    euler_solve,
    refine_study,
    suggest_horizon,
    trajectory_cm_check,
    trajectory_residual,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SELECTION_FAILED = 3
EXIT_BUDGET = 4
EXIT_IO = 5
EXIT_INVARIANT = 6
EXIT_EVALUATION = 7

# raised by a map or a geometric primitive while a command runs
evaluation_errors = (
    RegionError,
    EmptySetError,
    DimensionMismatch,
    NonFiniteError,
    ConvergenceError,
)

commands = ("solve", "classify", "potential", "refine")


def _json_dump(data, path: Path):
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def parse_grid(text: str) -> dict:
    """`LOW:HIGH:COUNT` per axis, axes separated by commas."""
    low, high, counts = [], [], []
    for axis in text.split(","):
        parts = axis.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid axis {axis!r} is not LOW:HIGH:COUNT")
        low.append(float(parts[0]))
        high.append(float(parts[1]))
        counts.append(int(parts[2]))
    return dict(low=low, high=high, counts=counts)


def parse_steps(text: str) -> List[int]:
    return [int(n) for n in text.split(",")]


class run_config:
    """One CLI invocation: command, paths, overrides and verbosity."""

    def __init__(
        self,
        command: str,
        input: Path,
        output: Path,
        tol: Optional[float] = None,
        strategy: Optional[str] = None,
        grid: Optional[dict] = None,
        max_length: Optional[int] = None,
        steps: Optional[List[int]] = None,
        classes: Optional[List[str]] = None,
        family: Optional[str] = None,
        verbosity: int = 0,
    ):
        if command not in commands:
            raise ValueError(f"command must be one of {list(commands)}")
        if tol is not None and not tol >= 0:
            raise ValueError("--tol must be non-negative")
        if max_length is not None and max_length < 1:
            raise ValueError("--max-length must be at least 1")
        if classes is not None:
            unknown = sorted(set(classes) - set(class_report.classes))
            if unknown:
                raise ValueError(f"unknown classes {unknown}")
        self.command = command
        self.input = Path(input)
        self.output = Path(output)
        self.tol = tol
        self.strategy = strategy
        self.grid = grid
        self.max_length = max_length
        self.steps = steps
        self.classes = list(classes) if classes else list(class_report.classes)
        self.family = family
        self.verbosity = verbosity

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "run_config":
        return cls(
            command=args.command,
            input=args.input,
            output=args.output,
            tol=args.tol,
            strategy=args.strategy,
            grid=None if args.grid is None else parse_grid(args.grid),
            max_length=args.max_length,
            steps=None if args.steps is None else parse_steps(args.steps),
            classes=None if args.classes is None else args.classes.split(","),
            family=args.family,
            verbosity=args.verbose - args.quiet,
        )

    def load_spec(self) -> problem_spec:
        """Read the problem document and apply the overrides."""
        spec = parse_problem(self.input.read_text())
        overrides = dict(
            tol=self.tol,
            strategy=self.strategy,
            grid=self.grid,
            max_length=self.max_length,
            steps=self.steps,
            family=self.family,
        )
        overrides = {key: value for key, value in overrides.items() if value is not None}
        return spec.replace(**overrides) if overrides else spec


def run_solve(config: run_config) -> int:
    spec = config.load_spec()
    try:
        traj = euler_solve(spec)
    except SelectionFailed as e:
        _json_dump(e.to_dict(), config.output / "selection_failure.json")
        logger.error("%s", e)
        return EXIT_SELECTION_FAILED
    node, hull = trajectory_residual(traj, spec.map)
    ok, m = trajectory_cm_check(traj, spec.tol)
    low, high = spec.box()
    radius = float(np.max(np.abs(np.concatenate([low, high]) - np.tile(spec.x0, 2))))
    summary = dict(
        steps=len(traj) - 1,
        h=spec.step,
        T=spec.horizon,
        strategy=spec.strategy,
        final_state=traj.states[-1].tolist(),
        final_velocity=traj.velocities[-1].tolist(),
        node_residual=node,
        hull_residual=hull,
        cm_verdict=ok,
        cm_violation=m,
        suggested_horizon=None if radius == 0 else suggest_horizon(spec.map, spec.x0, radius),
    )
    traj.to_csv(config.output / "trajectory.csv")
    _json_dump(summary, config.output / "summary.json")
    logger.info("trajectory written, node residual %r, CM %s", node, ok)
    return EXIT_OK


def run_classify(config: run_config) -> int:
    spec = config.load_spec()
    samples = spec.samples()
    L = spec.max_length
    classifiers = dict(
        monotone=lambda: classify_monotone(spec.map, samples, spec.tol),
        weakly_monotone=lambda: classify_weakly_monotone(spec.map, samples, spec.tol),
        cyclic_monotone=lambda: classify_cyclic_monotone(spec.map, samples, L, spec.tol),
        wcm=lambda: classify_wcm(spec.map, samples, L, spec.tol),
        condition4=lambda: check_condition4(spec.map, point_sequences(samples, L), spec.tol),
    )
    try:
        reports = [classifiers[name]() for name in config.classes]
    except BudgetExceeded as e:
        logger.error("%s", e)
        return EXIT_BUDGET
    for report in reports:
        logger.info("%s: %s", report.class_name, report.verdict)
    _json_dump([report.to_dict() for report in reports], config.output / "classification.json")
    return EXIT_OK


def _probe_box(probes: Sequence[np.ndarray]):
    points = np.array(probes)
    return points.min(axis=0), points.max(axis=0)


def build_family(spec: problem_spec, box=None) -> sequence_family:
    """The anchored family, grown by the solver trajectory unless `family` is 'trivial'."""
    family = sequence_family(spec.x0, spec.v0, box=box, tol=spec.tol)
    if spec.family == "trivial":
        return family
    try:
        sequence = euler_solve(spec).sequence()
    except SelectionFailed as e:
        logger.warning("trajectory stopped at step %d; growing with the CM prefix", e.step)
        sequence = e.sequence
    return grow_family(family, sequence)


def run_potential(config: run_config) -> int:
    spec = config.load_spec()
    probes = spec.probes if spec.probes is not None else spec.samples()
    family = build_family(spec, box=_probe_box(probes))
    dimension = spec.map.dimension

    g_rows = []
    for y in probes:
        row = {f"x[{i}]": float(y[i]) for i in range(dimension)}
        row["g"] = g_lower(family, y)
        # empty G columns where the support maximizer falls below g_lower
        selected = select_G(family, spec.map, y, spec.tol)
        for i in range(dimension):
            row[f"G[{i}]"] = None if selected is None else float(selected[i])
        g_rows.append(row)
    pd.DataFrame(g_rows).to_csv(config.output / "g_values.csv", index=False)
    (config.output / "family.json").write_text(family.to_document() + "\n")

    verdict_rows = []
    for x in probes:
        for v in spec.map.eval(x):
            if not membership_G(family, spec.map, x, v, spec.tol):
                continue
            row = {f"x[{i}]": float(x[i]) for i in range(dimension)}
            row.update({f"v[{i}]": float(v[i]) for i in range(dimension)})
            row["subgradient"] = subgradient_test(family, x, v, probes, spec.tol, map=spec.map)
            verdict_rows.append(row)
    columns = [f"x[{i}]" for i in range(dimension)] + [f"v[{i}]" for i in range(dimension)]
    verdicts = pd.DataFrame(verdict_rows, columns=columns + ["subgradient"])
    verdicts.to_csv(config.output / "subgradient.csv", index=False)
    if not verdicts["subgradient"].all():
        failures = int((~verdicts["subgradient"]).sum())
        logger.error("subgradient inequality failed for %d pairs", failures)
        return EXIT_INVARIANT
    return EXIT_OK


def run_refine(config: run_config) -> int:
    spec = config.load_spec()
    if spec.steps is None:
        raise ProblemValidationError("refine needs step counts", field="steps")
    try:
        table = refine_study(spec, spec.steps)
    except SelectionFailed as e:
        _json_dump(e.to_dict(), config.output / "selection_failure.json")
        logger.error("refinement with %s steps failed: %s", e.step_count, e)
        return EXIT_SELECTION_FAILED
    table.to_csv(config.output / "refinement.csv", index=False)
    return EXIT_OK


runners = dict(solve=run_solve, classify=run_classify, potential=run_potential, refine=run_refine)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wcm-inclusion",
        description="Cyclic-monotone analysis and Euler polygons for differential inclusions.",
    )
    parser.add_argument("command", choices=commands)
    parser.add_argument("--input", required=True, type=Path, help="problem document (JSON)")
    parser.add_argument("--output", required=True, type=Path, help="output directory")
    parser.add_argument("--tol", type=float)
    parser.add_argument("--strategy", choices=("exhaustive", "support", "inertial"))
    parser.add_argument("--grid", help="LOW:HIGH:COUNT per axis, comma separated")
    parser.add_argument("--max-length", dest="max_length", type=int)
    parser.add_argument("--steps", help="comma separated step counts")
    parser.add_argument(
        "--classes", help=f"comma separated subset of {','.join(class_report.classes)}"
    )
    parser.add_argument("--family", choices=("trivial", "trajectory"))
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("-q", "--quiet", action="count", default=0)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = run_config.from_args(args)
    except ValueError as e:
        parser.error(str(e))

    level = {-1: logging.ERROR, 0: logging.WARNING, 1: logging.INFO}.get(
        max(min(config.verbosity, 2), -1), logging.DEBUG
    )
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        config.output.mkdir(parents=True, exist_ok=True)
        return runners[config.command](config)
    except (ProblemParseError, ProblemValidationError) as e:
        print(f"invalid problem: {e}", file=sys.stderr)
        return EXIT_INVALID
    except evaluation_errors as e:
        print(f"map evaluation failed: {e}", file=sys.stderr)
        return EXIT_EVALUATION
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
