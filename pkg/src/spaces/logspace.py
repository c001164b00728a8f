"""
The F-space L_log of log-integrable functions on a finitely-presented space.

Concrete inhabitants are step functions: a real value per atom and a step
function per realized slot (non-realized components carry no concrete values,
i.e. functions vanish there). The F-norm

    ||f|| = integral of log(1 + |f|) dmu

is evaluated in closed form; values are reported in nats.
"""

import math
import operator
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Tuple

from src.core.config import POINTWISE_ATOL, SUPPORT_ATOL
from src.core.errors import MalformedFunction, SpaceMismatch, StructureMismatch
from src.spaces.intervals import StepFunction
from src.spaces.measure_algebra import (
    Density,
    Event,
    MeasureAlgebra,
    same_structure,
    validate_event,
)


@dataclass(frozen=True)
class LogFunction:
    """A simple/step function on a MeasureAlgebra."""

    space: MeasureAlgebra
    atom_values: Tuple[float, ...]
    step_parts: Tuple[StepFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "atom_values", tuple(float(v) for v in self.atom_values))
        object.__setattr__(self, "step_parts", tuple(self.step_parts))
        if len(self.atom_values) != self.space.n_atoms:
            raise MalformedFunction(
                f"{len(self.atom_values)} atom values for {self.space.n_atoms} atoms")
        if len(self.step_parts) != self.space.n_slots:
            raise MalformedFunction(
                f"{len(self.step_parts)} step parts for {self.space.n_slots} realized components")
        if not all(math.isfinite(v) for v in self.atom_values):
            raise MalformedFunction("atom values must be finite")

    def __add__(self, other: "LogFunction") -> "LogFunction":
        return add(self, other)

    def __sub__(self, other: "LogFunction") -> "LogFunction":
        return subtract(self, other)

    def __mul__(self, other):
        if isinstance(other, LogFunction):
            return pointwise_multiply(self, other)
        return scalar_multiply(self, other)

    def __rmul__(self, alpha: float) -> "LogFunction":
        return scalar_multiply(self, alpha)

    def __neg__(self) -> "LogFunction":
        return scalar_multiply(self, -1.0)


@dataclass(frozen=True)
class FNormValue:
    value: float

    def __post_init__(self):
        if not self.value >= 0.0:
            raise MalformedFunction(f"F-norm must be non-negative, got {self.value!r}")

    def __float__(self) -> float:
        return self.value


# ==================== CONSTRUCTORS ====================

def zero(space: MeasureAlgebra) -> LogFunction:
    return constant(space, 0.0)


def constant(space: MeasureAlgebra, value: float) -> LogFunction:
    return LogFunction(space, (float(value),) * space.n_atoms,
                       tuple(StepFunction.constant(value) for _ in range(space.n_slots)))


def indicator(space: MeasureAlgebra, e: Event, value: float = 1.0) -> LogFunction:
    validate_event(space, e)
    atoms = tuple(value if i in e.atoms else 0.0 for i in range(space.n_atoms))
    parts = tuple(StepFunction.indicator(e.part(slot), value) for slot in range(space.n_slots))
    return LogFunction(space, atoms, parts)


def from_pieces(space: MeasureAlgebra, atom_values: Sequence[float],
                step_parts: Iterable[Iterable[Tuple[float, float]]]) -> LogFunction:
    """Build from atom values and per-slot (length, value) pieces."""
    parts = tuple(StepFunction.from_lengths(pieces) for pieces in step_parts)
    return LogFunction(space, tuple(atom_values), parts)


def density_function(space: MeasureAlgebra, density: Density) -> LogFunction:
    """The density as a function on space (zero off its band)."""
    return LogFunction(space, density.atom_ratios, density.piece_ratios)


def rebase(f: LogFunction, space: MeasureAlgebra) -> LogFunction:
    """The same values read on a space of the same shape but other masses."""
    if not same_structure(f.space, space):
        raise StructureMismatch("rebase needs a space of the same shape")
    return LogFunction(space, f.atom_values, f.step_parts)


# ==================== ALGEBRA OPERATIONS ====================

def _require_same_space(f: LogFunction, g: LogFunction) -> None:
    if f.space != g.space:
        raise SpaceMismatch("functions live on different spaces")


def _pointwise(f: LogFunction, g: LogFunction, op: Callable[[float, float], float]) -> LogFunction:
    _require_same_space(f, g)
    atoms = tuple(op(a, b) for a, b in zip(f.atom_values, g.atom_values))
    parts = tuple(s.combine(t, op) for s, t in zip(f.step_parts, g.step_parts))
    return LogFunction(f.space, atoms, parts)


def _unary(f: LogFunction, fn: Callable[[float], float]) -> LogFunction:
    return LogFunction(f.space, tuple(fn(v) for v in f.atom_values),
                       tuple(s.map(fn) for s in f.step_parts))


def add(f: LogFunction, g: LogFunction) -> LogFunction:
    return _pointwise(f, g, operator.add)


def subtract(f: LogFunction, g: LogFunction) -> LogFunction:
    return _pointwise(f, g, operator.sub)


def pointwise_multiply(f: LogFunction, g: LogFunction) -> LogFunction:
    return _pointwise(f, g, operator.mul)


def scalar_multiply(f: LogFunction, alpha: float) -> LogFunction:
    alpha = float(alpha)
    return _unary(f, lambda v: alpha * v)


def absolute(f: LogFunction) -> LogFunction:
    return _unary(f, abs)


def truncate(f: LogFunction, level: float) -> LogFunction:
    """min(f, level), pointwise."""
    return _unary(f, lambda v: min(v, level))


def restrict(f: LogFunction, e: Event) -> LogFunction:
    """f times the indicator of e."""
    return pointwise_multiply(f, indicator(f.space, e))


def simplified(f: LogFunction) -> LogFunction:
    return LogFunction(f.space, f.atom_values, tuple(s.simplified() for s in f.step_parts))


# ==================== NORM, METRIC, INTEGRALS ====================

def _log_integral(f: LogFunction) -> float:
    terms = [a.weight * math.log1p(abs(v)) for a, v in zip(f.space.atoms, f.atom_values)]
    for alpha, step in zip(f.space.slot_measures, f.step_parts):
        terms.append(alpha * step.integral(lambda v: math.log1p(abs(v))))
    return math.fsum(terms)


def fnorm(f: LogFunction) -> FNormValue:
    """Closed-form F-norm: sum of mass times log(1 + |value|) over every piece."""
    return FNormValue(_log_integral(f))


def distance(f: LogFunction, g: LogFunction) -> float:
    _require_same_space(f, g)
    return fnorm(subtract(f, g)).value


def integrate(f: LogFunction, density: Optional[Density] = None) -> float:
    """Plain integral of f, optionally against density * mu."""
    if density is not None:
        f = pointwise_multiply(f, density_function(f.space, density))
    terms = [a.weight * v for a, v in zip(f.space.atoms, f.atom_values)]
    for alpha, step in zip(f.space.slot_measures, f.step_parts):
        terms.append(alpha * step.integral())
    return math.fsum(terms)


def support(f: LogFunction, atol: float = SUPPORT_ATOL) -> Event:
    atoms = frozenset(i for i, v in enumerate(f.atom_values) if abs(v) > atol)
    return Event(atoms, tuple(step.support(atol) for step in f.step_parts))


def max_abs_difference(f: LogFunction, g: LogFunction) -> float:
    _require_same_space(f, g)
    gaps = [abs(a - b) for a, b in zip(f.atom_values, g.atom_values)]
    gaps += [s.max_abs_difference(t) for s, t in zip(f.step_parts, g.step_parts)]
    return max(gaps, default=0.0)


def functions_equal(f: LogFunction, g: LogFunction, atol: float = POINTWISE_ATOL) -> bool:
    return f.space == g.space and max_abs_difference(f, g) <= atol
