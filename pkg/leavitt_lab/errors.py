from __future__ import annotations

from typing import Sequence


class LeavittError(Exception):
    exit_code = 3


class GraphSyntaxError(LeavittError):
    exit_code = 2

    def __init__(self, message: str, *, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class GraphValidationError(LeavittError):
    exit_code = 2


class ExpressionSyntaxError(LeavittError):
    exit_code = 2

    def __init__(self, message: str, *, column: int) -> None:
        super().__init__(f"column {column}: {message}")
        self.column = column


class UnknownIdentifier(LeavittError):
    exit_code = 2


class FieldSpecError(LeavittError):
    exit_code = 2


class MixedAlgebra(LeavittError):
    pass


class DivisionByZero(LeavittError, ZeroDivisionError):
    pass


class CyclicGraph(LeavittError):
    def __init__(self, message: str, *, cycle: Sequence[str] = ()) -> None:
        super().__init__(message)
        self.cycle = tuple(cycle)


class InfiniteDimensional(CyclicGraph):
    pass


class NotIdempotent(LeavittError):
    pass


class PreconditionViolation(LeavittError):
    pass


class WrongGraph(LeavittError):
    pass


class ShapeMismatch(LeavittError):
    pass


class DimensionCapExceeded(LeavittError):
    exit_code = 4

    def __init__(self, dimension: int, cap: int) -> None:
        super().__init__(
            f"dimension {dimension} exceeds the configured cap of {cap}; "
            "raise --dim-cap to proceed"
        )
        self.dimension = dimension
        self.cap = cap


class TheoremViolation(LeavittError):
    """An invariant that holds for every Leavitt path algebra failed: a bug, not bad input."""

    exit_code = 1


class ReportFormatError(LeavittError):
    exit_code = 2


class InputFileError(LeavittError):
    exit_code = 2
