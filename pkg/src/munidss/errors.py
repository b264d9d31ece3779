"""Exception hierarchy shared by the engine, the CLI and the HTTP service.

Every exception carries an ``api_code`` drawn from the fixed set
VALIDATION / NOT_FOUND / CONFLICT / CONVERGENCE / INTERNAL so the service
layer can map failures to wire errors without inspecting types twice.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """One machine-readable rule violation found in input data."""

    code: str
    message: str
    where: str = ""

    def render(self) -> str:
        location = f" at {self.where}" if self.where else ""
        return f"{self.code}{location}: {self.message}"


class EngineError(Exception):
    api_code = "INTERNAL"


class ValidationError(EngineError):
    """Input data breaks a contract; ``violations`` lists every broken rule."""

    api_code = "VALIDATION"

    def __init__(self, message: str, violations: tuple[Violation, ...] | list[Violation] = ()):
        super().__init__(message)
        self.violations: tuple[Violation, ...] = tuple(violations)

    def detail(self) -> str:
        lines = [str(self)]
        lines.extend(v.render() for v in self.violations)
        return "\n".join(lines)


class ParseError(ValidationError):
    """Malformed serialized input (not even JSON)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class NotFoundError(EngineError):
    api_code = "NOT_FOUND"


class ConflictError(EngineError):
    """Optimistic-concurrency failure: the caller's revision is stale."""

    api_code = "CONFLICT"

    def __init__(self, message: str, expected_revision: int | None = None):
        super().__init__(message)
        self.expected_revision = expected_revision


class ConvergenceError(EngineError):
    """Closed-form influence requested outside its convergence region."""

    api_code = "CONVERGENCE"

    def __init__(self, message: str, rho_estimate: float):
        super().__init__(message)
        self.rho_estimate = rho_estimate


class SingularityError(EngineError):
    # Unreachable when the radius guard holds; kept as a defensive branch.
    api_code = "CONVERGENCE"
