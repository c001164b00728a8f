"""
Exception hierarchy for the LogSpace toolkit.

Input problems exit the CLI with status 2, sound negative mathematical answers
with status 1.
"""

from typing import Optional

from src.core.config import EXIT_INPUT_ERROR, EXIT_NEGATIVE

DISJOINTNESS = "disjointness-preservation"
MEASURE_PRESERVATION = "measure-preservation"
MULTIPLIER_DENSITY = "multiplier-density-identity"
TOTAL_MEASURE_SEPARATION = "total-measure-separation"
SURJECTIVITY = "surjectivity"
NORM_PRESERVATION = "norm-preservation"


class LogSpaceError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_status = EXIT_INPUT_ERROR
    violated_property: Optional[str] = None

    def __init__(self, message: str, violated_property: Optional[str] = None):
        super().__init__(message)
        self.message = message
        if violated_property is not None:
            self.violated_property = violated_property

    @property
    def name(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict:
        return {
            "success": False,
            "error": self.name,
            "message": self.message,
            "violated_property": self.violated_property,
        }


class InputError(LogSpaceError):
    exit_status = EXIT_INPUT_ERROR


class MathematicalRefusal(LogSpaceError):
    exit_status = EXIT_NEGATIVE


class ParseError(InputError):
    """A document failed to parse or validate."""

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, field: Optional[str] = None):
        where = []
        if path:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field {field}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")
        self.path = path
        self.line = line
        self.field = field

    def to_dict(self) -> dict:
        report = super().to_dict()
        report.update({"path": self.path, "line": self.line, "field": self.field})
        return report


class EmptyAlgebra(InputError):
    pass


class MalformedEvent(InputError):
    pass


class MalformedFunction(InputError):
    pass


class MalformedMap(InputError):
    pass


class SpaceMismatch(InputError):
    pass


class StructureMismatch(InputError):
    pass


class ZeroMeasure(InputError):
    pass


class TooLarge(InputError):
    pass


class EqualTotals(InputError):
    pass


class InvalidParameter(InputError):
    """A numeric option is outside its admissible range."""


class NotMeasurePreserving(MathematicalRefusal):
    violated_property = MEASURE_PRESERVATION


class NotSurjective(MathematicalRefusal):
    violated_property = SURJECTIVITY


class DisjointnessViolation(MathematicalRefusal):
    violated_property = DISJOINTNESS


class DegenerateColumn(DisjointnessViolation):
    """A nonzero function was sent to zero; an isometry cannot do that."""


class MeasureMismatch(MathematicalRefusal):
    violated_property = MEASURE_PRESERVATION


class FormulaViolation(MathematicalRefusal):
    violated_property = MULTIPLIER_DENSITY
