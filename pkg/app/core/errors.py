"""Custom exception classes and CLI exit-code handlers.

The CLI in app/main.py resolves every escaping exception through
exit_code_for(); config problems exit with 2, everything else with 1.
"""

from __future__ import annotations

from typing import Any, Optional

from pydantic import ValidationError

# ---------------------------------------------------------------------------
# Exception classes
# ---------------------------------------------------------------------------


class UnlearnToolError(Exception):
    """Base class for all domain errors raised by the toolkit."""


class ConfigError(UnlearnToolError):
    """Raised when an experiment config (or a CLI override) is invalid."""

    def __init__(self, field_path: str, detail: str) -> None:
        self.field_path = field_path
        self.detail = detail
        super().__init__(f"{field_path}: {detail}" if field_path else detail)

    @classmethod
    def from_validation_error(
        cls, exc: ValidationError, prefix: str = ""
    ) -> "ConfigError":
        """Collapse a pydantic ValidationError into one ConfigError.

        The first error's location becomes ``field_path``; every error is
        listed in ``detail``.
        """
        errors = exc.errors()
        lines: list[str] = []
        for err in errors:
            loc = ".".join(str(p) for p in (prefix, *err["loc"]) if p != "")
            lines.append(f"{loc or '<root>'}: {err['msg']}")
        first = errors[0] if errors else {"loc": ()}
        first_path = ".".join(str(p) for p in (prefix, *first["loc"]) if p != "")
        return cls(first_path, "; ".join(lines))


class DimensionMismatchError(UnlearnToolError, ValueError):
    """Raised when array shapes or vector lengths do not line up."""

    def __init__(self, what: str, expected: Any, actual: Any) -> None:
        self.what = what
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what}: expected {expected}, got {actual}")


class EmptySetError(UnlearnToolError, ValueError):
    """Raised when an operation needs a non-empty batch, id set or pool."""

    def __init__(self, what: str) -> None:
        self.what = what
        super().__init__(f"{what} must not be empty")


class LabelRangeError(UnlearnToolError, ValueError):
    """Raised when a label falls outside [0, n_classes)."""

    def __init__(self, label: int, n_classes: int) -> None:
        self.label = label
        self.n_classes = n_classes
        super().__init__(f"label {label} outside [0, {n_classes})")


class DataFormatError(UnlearnToolError, ValueError):
    """Raised when a CSV dataset cannot be parsed."""

    def __init__(
        self,
        path: str,
        detail: str,
        row: Optional[int] = None,
        column: Optional[int] = None,
    ) -> None:
        self.path = path
        self.row = row
        self.column = column
        self.detail = detail
        where = ""
        if row is not None:
            where += f" row {row}"
        if column is not None:
            where += f" column {column}"
        super().__init__(f"{path}:{where}: {detail}" if where else f"{path}: {detail}")


class UnknownClassError(UnlearnToolError, ValueError):
    """Raised when a class-wise split names a label absent from the data."""

    def __init__(self, label: int, detail: str = "not present in dataset") -> None:
        self.label = label
        super().__init__(f"class {label} {detail}")


class InvalidPlanError(UnlearnToolError, ValueError):
    """Raised when a curriculum plan cannot be built or is unusable."""

    def __init__(self, violations: list[str]) -> None:
        self.violations = violations
        super().__init__("invalid curriculum plan: " + "; ".join(violations))


class ZeroGradientError(UnlearnToolError, ValueError):
    """Raised when an angle is requested for a zero-norm vector."""

    def __init__(self, which: str) -> None:
        self.which = which
        super().__init__(f"{which} has zero norm; angle is undefined")


class CheckpointError(UnlearnToolError):
    """Raised when a checkpoint or plan document fails schema validation."""

    def __init__(self, path: str, errors: list[str]) -> None:
        self.path = path
        self.errors = errors
        super().__init__(f"{path}: " + "; ".join(errors))


# ---------------------------------------------------------------------------
# CLI exit-code handlers
# ---------------------------------------------------------------------------

EXIT_OK = 0
EXIT_RUNTIME_ERROR = 1
EXIT_CONFIG_ERROR = 2

_EXIT_CODES: dict[type[BaseException], int] = {
    ConfigError: EXIT_CONFIG_ERROR,
    ValidationError: EXIT_CONFIG_ERROR,
}


def exit_code_for(exc: BaseException) -> int:
    """Map an exception escaping a CLI command to its process exit code."""
    for exc_type, code in _EXIT_CODES.items():
        if isinstance(exc, exc_type):
            return code
    return EXIT_RUNTIME_ERROR
