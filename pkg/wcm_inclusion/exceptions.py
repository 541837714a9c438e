from typing import Optional


class DimensionMismatch(ValueError):
    pass


class EmptySetError(ValueError):
    pass


class NonFiniteError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


class RegionError(LookupError):
    pass


class NotInValueSet(ValueError):
    pass


class AnchorMismatch(ValueError):
    pass


class NotCMError(ValueError):
    pass


class ProblemParseError(ValueError):
    """A problem document could not be read.

    Parameters
    ----------
    message : str
        Human readable description.
    field : Optional[str]
        Dotted name of the offending field, if known.
    line : Optional[int]
        Line number in the document, if known.
    """

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if field is not None:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class ProblemValidationError(ValueError):
    """A problem document parsed but violates an invariant; `rule` names it."""

    def __init__(self, rule: str, field: Optional[str] = None):
        self.rule = rule
        self.field = field
        super().__init__(rule if field is None else f"{rule} (field '{field}')")


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"classification needs at least {required} chain evaluations, budget is {budget}"
        )


class SelectionFailed(RuntimeError):
    """No CM-preserving velocity exists at step `step`.

    Carries the full replay state: the state `x` where the selection was
    attempted, the running sequence with its chain slacks and the slack of
    every candidate.
    """

    def __init__(self, step: int, x, sequence, slacks: list):
        self.step = step
        self.x = x
        self.sequence = sequence
        self.slacks = slacks
        # set by refinement studies to the resolution that failed
        self.step_count = None
        best = max((s for _, s in slacks), default=float("nan"))
        super().__init__(
            f"no CM-preserving velocity at step {step}, x={list(map(float, x))}, "
            f"best candidate slack {best!r}"
        )

    def to_dict(self) -> dict:
        return dict(
            step=self.step,
            step_count=self.step_count,
            x=[float(c) for c in self.x],
            sequence=self.sequence.to_dict(),
            sequence_slacks=[float(s) for s in self.sequence.slacks()],
            candidates=[
                dict(v=[float(c) for c in v], slack=float(s)) for v, s in self.slacks
            ],
        )
