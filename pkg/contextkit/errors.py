"""
Exception hierarchy and validation records

Every exception carries the CLI exit code it maps to:
0 success, 1 domain verdict / failed premise, 2 input error, 3 resource cap.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


class ContextkitError(Exception):
    """Base class for every error raised by contextkit."""

    exit_code = 1


class InputError(ContextkitError):
    """Unreadable or malformed input (file, JSON, field, number literal)."""

    exit_code = 2

    def __init__(self, message: str, source: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None,
                 field_path: Optional[str] = None):
        self.source = source
        self.line = line
        self.column = column
        self.field_path = field_path
        where = []
        if source:
            where.append(source)
        if line is not None:
            where.append(f"line {line}" + (f", column {column}" if column is not None else ""))
        if field_path:
            where.append(f"field '{field_path}'")
        super().__init__(f"{': '.join(where)}: {message}" if where else message)


class StructuralError(InputError):
    """Dimension mismatch or unsupported arity."""


class LookupFailure(ContextkitError, KeyError):
    """A referenced response, preparation, context or variable does not exist."""

    exit_code = 2

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "lookup failure"


class ContractError(ContextkitError, ValueError):
    """A documented precondition does not hold."""


class DegenerateBasisError(ContractError):
    """The compression subspace has no basis with nonzero entry sums."""


class IncidentError(ContextkitError):
    """A result contradicting an established theorem. Never silently ignored."""


class SolverError(ContextkitError):
    """An iterative solver stopped without converging. Carries the best bracket."""

    def __init__(self, message: str, lower: Optional[float] = None, upper: Optional[float] = None):
        self.lower = lower
        self.upper = upper
        if lower is not None and upper is not None:
            message = f"{message} (bracket [{lower:.6g}, {upper:.6g}])"
        super().__init__(message)


class InternalError(ContextkitError):
    """Self-consistency check failed inside contextkit."""


class InstanceTooLarge(ContextkitError):
    """A configured resource cap was exceeded."""

    exit_code = 3

    def __init__(self, what: str, size: int, cap: int):
        self.what = what
        self.size = size
        self.cap = cap
        super().__init__(f"instance too large: {what} has size {size}, cap is {cap}")


@dataclass(frozen=True)
class Violation:
    """A single failed invariant. Validators return lists of these."""

    code: str
    message: str
    location: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"code": self.code, "message": self.message, "location": dict(self.location)}


def violations_to_dicts(violations: List[Violation]) -> List[Dict[str, Any]]:
    return [v.to_dict() for v in violations]
