"""
Exception hierarchy of the simulation engine.

Services raise these; the scenario runner turns them into failed cell results
and the CLI into a non-zero exit code.
"""

from typing import Optional


class EngineError(Exception):
    """Base class for every error raised by the engine."""


class InputDataError(EngineError):
    """Input file or in-memory data violates a schema or a type invariant."""

    def __init__(
        self, message: str, path: Optional[str] = None, line: Optional[int] = None
    ):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class ConfigurationError(EngineError):
    """Run or generator configuration is invalid or infeasible."""


class CalibrationError(EngineError):
    """Calibrated production parameters do not reproduce baseline output."""


class ConvergenceError(EngineError):
    """An iterative procedure hit its iteration cap."""

    def __init__(self, message: str, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"{message} (iterations={iterations}, residual={residual:.6g})"
        )


class InvariantViolationError(EngineError):
    """A structural property that must hold on every run was violated."""


__all__ = [
    "EngineError",
    "InputDataError",
    "ConfigurationError",
    "CalibrationError",
    "ConvergenceError",
    "InvariantViolationError",
]
