"""Exception hierarchy for compile-time and run-time failures."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from src.models import ExecutionTrace


class MNCError(Exception):
    """Base class for every error raised by this package."""

    exit_code: int = 1


class AddressingError(MNCError):
    """Address outside [0, S-1], non-finite, or non-integral in strict mode."""

    exit_code = 3


class StructuralError(MNCError):
    """Network dimensions do not chain, or weights are not finite."""

    exit_code = 3


class ContractViolation(MNCError):
    exit_code = 3


class GateContractError(ContractViolation):
    """Gates not one-hot, an inhibited module leaked output, or the merge/frame law broke."""

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = violations or []


class GateBoundError(ContractViolation):
    """A merged output exceeded the gate bound B."""


class ProgramHaltedError(ContractViolation):
    """Run was asked to step a memory whose halt cell is already negative."""


class NonTerminationError(MNCError):
    """max_steps exhausted before the halt cell went negative."""

    exit_code = 4

    def __init__(self, message: str, trace: "ExecutionTrace"):
        super().__init__(message)
        self.trace = trace


class CompileError(MNCError):
    exit_code = 6


class TableConflictError(CompileError):
    """One table key mapped to two different values."""

    def __init__(self, message: str, steps: tuple[int, int] | None = None):
        super().__init__(message)
        self.steps = steps


class LayoutError(CompileError):
    """Memory layout overlaps itself or does not fit the capacity."""


class CapacityError(CompileError):
    """A symbolic run needed more node records than the layout provides."""


class InstanceFormatError(MNCError):
    exit_code = 2


class TraceFormatError(MNCError):
    exit_code = 2


class TraceIntegrityError(MNCError):
    """Trace or memory contents cannot support the requested extraction."""

    exit_code = 3
