"""
Finitely-presented measure algebras.

A space is a list of weighted atoms plus a list of homogeneous non-atomic
components. Components of weight aleph_0 are *realized*: modelled as the unit
interval [0, 1) with constant density equal to the component's measure.
Higher weights exist only for passport arithmetic.

Events, measures, Radon-Nikodym densities and passports live here.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd

from src.core.config import STRUCTURAL_RTOL
from src.core.errors import (
    EmptyAlgebra,
    MalformedEvent,
    StructureMismatch,
    ZeroMeasure,
)
from src.spaces.intervals import IntervalSet, StepFunction

_LABEL_PATTERN = re.compile(r"^aleph_(\d+)$")


def close(a: float, b: float, tol: float = STRUCTURAL_RTOL) -> bool:
    """Relative equality used for every decision on measures and norms."""
    return math.isclose(a, b, rel_tol=tol, abs_tol=0.0)


def _positive(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ZeroMeasure(f"{what} must be finite, got {value!r}")
    if value <= 0.0:
        raise ZeroMeasure(f"{what} must be strictly positive, got {value!r}")
    return value


@dataclass(frozen=True, order=True)
class WeightLabel:
    """The cardinal aleph_index; labels compare by index."""

    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"weight label index must be non-negative, got {self.index}")

    @classmethod
    def parse(cls, text: str) -> "WeightLabel":
        match = _LABEL_PATTERN.match(text.strip())
        if not match:
            raise ValueError(f"weight label must look like 'aleph_<k>', got {text!r}")
        return cls(int(match.group(1)))

    @property
    def name(self) -> str:
        return f"aleph_{self.index}"

    def __str__(self) -> str:
        return self.name


ALEPH_0 = WeightLabel(0)


@dataclass(frozen=True)
class Atom:
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "weight", _positive(self.weight, "atom weight"))


@dataclass(frozen=True)
class HomogeneousComponent:
    weight_label: WeightLabel
    measure: float

    def __post_init__(self):
        object.__setattr__(self, "measure", _positive(self.measure, "component measure"))

    @property
    def realized(self) -> bool:
        return self.weight_label == ALEPH_0


@dataclass(frozen=True)
class MeasureAlgebra:
    """Atoms plus homogeneous components; realized components are indexed by slot."""

    atoms: Tuple[Atom, ...] = ()
    components: Tuple[HomogeneousComponent, ...] = ()

    @classmethod
    def of(cls, atoms: Iterable[float] = (),
           components: Iterable[Union[HomogeneousComponent, Tuple]] = ()) -> "MeasureAlgebra":
        """Convenience constructor: atom weights and (label, measure) pairs."""
        built = []
        for comp in components:
            if isinstance(comp, HomogeneousComponent):
                built.append(comp)
                continue
            label, measure = comp
            if not isinstance(label, WeightLabel):
                label = WeightLabel.parse(label) if isinstance(label, str) else WeightLabel(int(label))
            built.append(HomogeneousComponent(label, measure))
        return cls(tuple(Atom(w) for w in atoms), tuple(built))

    @property
    def atom_weights(self) -> Tuple[float, ...]:
        return tuple(a.weight for a in self.atoms)

    @property
    def realized_slots(self) -> Tuple[int, ...]:
        """Component indices of the realized components, in order."""
        return tuple(k for k, c in enumerate(self.components) if c.realized)

    @property
    def slot_measures(self) -> Tuple[float, ...]:
        return tuple(self.components[k].measure for k in self.realized_slots)

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_slots(self) -> int:
        return len(self.realized_slots)

    def is_empty(self) -> bool:
        return not self.atoms and not self.components

    def is_atomic(self) -> bool:
        return not self.components

    def require_nonempty(self) -> "MeasureAlgebra":
        if self.is_empty():
            raise EmptyAlgebra("the measure algebra has neither atoms nor components")
        return self

    def describe(self) -> str:
        return f"{self.n_atoms} atoms, {len(self.components)} components ({self.n_slots} realized)"


@dataclass(frozen=True)
class Event:
    """An element of the algebra: a set of atoms plus interval unions per realized slot."""

    atoms: FrozenSet[int] = frozenset()
    parts: Tuple[IntervalSet, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", frozenset(self.atoms))
        parts = tuple(self.parts)
        # trailing empty parts carry no information; drop them so equality is structural
        while parts and parts[-1].is_empty():
            parts = parts[:-1]
        object.__setattr__(self, "parts", parts)

    @classmethod
    def build(cls, atoms: Iterable[int] = (),
              parts: Optional[Dict[int, Iterable[Sequence[float]]]] = None) -> "Event":
        """Event from atom indices and {slot: [(a, b), ...]} interval pairs."""
        parts = parts or {}
        if any(slot < 0 for slot in parts):
            raise MalformedEvent("slot indices must be non-negative")
        width = max(parts, default=-1) + 1
        sets = tuple(IntervalSet.from_pairs(parts.get(slot, ())) for slot in range(width))
        return cls(frozenset(int(i) for i in atoms), sets)

    def part(self, slot: int) -> IntervalSet:
        return self.parts[slot] if slot < len(self.parts) else IntervalSet.empty()

    def is_empty(self) -> bool:
        return not self.atoms and not self.parts


def full_event(space: MeasureAlgebra) -> Event:
    """The unit 1 of the algebra (non-realized components are not representable)."""
    return Event(frozenset(range(space.n_atoms)),
                 tuple(IntervalSet.unit() for _ in range(space.n_slots)))


def validate_event(space: MeasureAlgebra, e: Event) -> Event:
    bad = [i for i in e.atoms if not 0 <= i < space.n_atoms]
    if bad:
        raise MalformedEvent(f"atom indices {sorted(bad)} out of range for {space.n_atoms} atoms")
    if len(e.parts) > space.n_slots:
        raise MalformedEvent(
            f"event has interval parts on {len(e.parts)} slots, space has {space.n_slots} realized")
    for slot, part in enumerate(e.parts):
        cursor = 0.0
        for a, b in part.pieces:
            if a < 0.0 or b > 1.0 or b <= a:
                raise MalformedEvent(f"slot {slot}: interval [{a}, {b}) is not inside [0, 1)")
            if a < cursor:
                raise MalformedEvent(f"slot {slot}: interval [{a}, {b}) overlaps or precedes "
                                     f"the piece ending at {cursor}")
            cursor = b
    return e


def total_measure(space: MeasureAlgebra) -> float:
    space.require_nonempty()
    return math.fsum([*space.atom_weights, *(c.measure for c in space.components)])


def measure(space: MeasureAlgebra, e: Event) -> float:
    validate_event(space, e)
    terms = [space.atoms[i].weight for i in e.atoms]
    measures = space.slot_measures
    terms += [measures[slot] * part.length for slot, part in enumerate(e.parts)]
    return math.fsum(terms)


def _slot_count(space: Optional[MeasureAlgebra], *events: Event) -> int:
    if space is not None:
        return space.n_slots
    return max((len(e.parts) for e in events), default=0)


def event_meet(space: MeasureAlgebra, e: Event, q: Event) -> Event:
    validate_event(space, e)
    validate_event(space, q)
    n = _slot_count(space, e, q)
    return Event(e.atoms & q.atoms, tuple(e.part(k).intersection(q.part(k)) for k in range(n)))


def event_join(space: MeasureAlgebra, e: Event, q: Event) -> Event:
    validate_event(space, e)
    validate_event(space, q)
    n = _slot_count(space, e, q)
    return Event(e.atoms | q.atoms, tuple(e.part(k).union(q.part(k)) for k in range(n)))


def event_complement(space: MeasureAlgebra, e: Event) -> Event:
    validate_event(space, e)
    atoms = frozenset(range(space.n_atoms)) - e.atoms
    return Event(atoms, tuple(e.part(k).complement() for k in range(space.n_slots)))


def event_difference(space: MeasureAlgebra, e: Event, q: Event) -> Event:
    return event_meet(space, e, event_complement(space, q))


def events_disjoint(space: MeasureAlgebra, e: Event, q: Event) -> bool:
    return event_meet(space, e, q).is_empty()


def event_subset(space: MeasureAlgebra, e: Event, q: Event) -> bool:
    return event_difference(space, e, q).is_empty()


# ==================== DENSITIES ====================

@dataclass(frozen=True)
class Density:
    """
    A Radon-Nikodym density on a space: one ratio per atom and a step function
    per realized slot. When `band` is set the density is only defined on that
    event; entries outside it are stored as 0 and ignored.
    """

    atom_ratios: Tuple[float, ...]
    piece_ratios: Tuple[StepFunction, ...]
    band: Optional[Event] = None

    def __post_init__(self):
        for value in self.band_values():
            if not (value > 0.0 and math.isfinite(value)):
                raise ZeroMeasure(f"density values must be finite and positive, got {value!r}")

    def band_values(self) -> List[float]:
        values = []
        for i, ratio in enumerate(self.atom_ratios):
            if self.band is None or i in self.band.atoms:
                values.append(ratio)
        for slot, step in enumerate(self.piece_ratios):
            if self.band is None:
                values.extend(step.values)
                continue
            inside = self.band.part(slot)
            for a, b, v in step.pieces():
                if inside.contains((a + b) / 2):
                    values.append(v)
        return values

    def sup(self) -> float:
        return max(self.band_values(), default=0.0)

    def inf(self) -> float:
        return min(self.band_values(), default=0.0)


def same_structure(a: MeasureAlgebra, b: MeasureAlgebra) -> bool:
    """Same atom count and same component list up to measures."""
    if a.n_atoms != b.n_atoms or len(a.components) != len(b.components):
        return False
    return all(x.weight_label == y.weight_label for x, y in zip(a.components, b.components))


def radon_nikodym(nu: MeasureAlgebra, mu: MeasureAlgebra) -> Density:
    """d(nu)/d(mu) for two measures on the same structure."""
    nu.require_nonempty()
    mu.require_nonempty()
    if not same_structure(nu, mu):
        raise StructureMismatch(f"cannot compare measures on {nu.describe()} and {mu.describe()}")
    atom_ratios = tuple(n.weight / m.weight for n, m in zip(nu.atoms, mu.atoms))
    piece_ratios = tuple(StepFunction.constant(n / m)
                         for n, m in zip(nu.slot_measures, mu.slot_measures))
    return Density(atom_ratios, piece_ratios)


def rescale(space: MeasureAlgebra, factor: float) -> MeasureAlgebra:
    """The same structure with every mass multiplied by factor."""
    factor = _positive(factor, "scale factor")
    return MeasureAlgebra(
        tuple(Atom(a.weight * factor) for a in space.atoms),
        tuple(HomogeneousComponent(c.weight_label, c.measure * factor)
              for c in space.components),
    )


def with_measures(space: MeasureAlgebra, atom_weights: Sequence[float],
                  component_measures: Sequence[float]) -> MeasureAlgebra:
    """The same structure carrying new masses."""
    if len(atom_weights) != space.n_atoms or len(component_measures) != len(space.components):
        raise StructureMismatch("new masses do not match the space's shape")
    return MeasureAlgebra(
        tuple(Atom(w) for w in atom_weights),
        tuple(HomogeneousComponent(c.weight_label, m)
              for c, m in zip(space.components, component_measures)),
    )


def canonical_atom_order(space: MeasureAlgebra) -> List[int]:
    """Atom indices by descending weight, ties kept in input order."""
    return sorted(range(space.n_atoms), key=lambda i: -space.atoms[i].weight)


# ==================== PASSPORTS ====================

@dataclass(frozen=True)
class Passport:
    """(weight label, total measure) rows of the non-atomic part plus the atom multiset."""

    rows: Tuple[Tuple[WeightLabel, float], ...]
    atom_weights: Tuple[float, ...] = field(default=())

    def rows_match(self, other: "Passport", tol: float = STRUCTURAL_RTOL) -> bool:
        return not self.row_diff(other, tol)

    def atoms_match(self, other: "Passport", tol: float = STRUCTURAL_RTOL) -> bool:
        return not self.atom_diff(other, tol)

    def row_diff(self, other: "Passport", tol: float = STRUCTURAL_RTOL) -> List[dict]:
        mine = dict(self.rows)
        theirs = dict(other.rows)
        diff = []
        for label in sorted(set(mine) | set(theirs)):
            a, b = mine.get(label), theirs.get(label)
            if a is None or b is None or not close(a, b, tol):
                diff.append({"weight_label": label.name, "left": a, "right": b})
        return diff

    def atom_diff(self, other: "Passport", tol: float = STRUCTURAL_RTOL) -> List[dict]:
        diff = []
        left, right = self.atom_weights, other.atom_weights
        for position in range(max(len(left), len(right))):
            a = left[position] if position < len(left) else None
            b = right[position] if position < len(right) else None
            if a is None or b is None or not close(a, b, tol):
                diff.append({"position": position, "left": a, "right": b})
        return diff

    def to_dict(self) -> dict:
        return {
            "rows": [{"weight_label": label.name, "alpha": alpha} for label, alpha in self.rows],
            "atom_weights": list(self.atom_weights),
        }


def passport(space: MeasureAlgebra) -> Passport:
    space.require_nonempty()
    rows: Tuple[Tuple[WeightLabel, float], ...] = ()
    if space.components:
        frame = pd.DataFrame({
            "label": [c.weight_label.index for c in space.components],
            "measure": [c.measure for c in space.components],
        })
        # fsum makes the row totals independent of component order
        grouped = frame.groupby("label", sort=True)["measure"].agg(math.fsum)
        rows = tuple((WeightLabel(int(label)), float(alpha)) for label, alpha in grouped.items())
    atoms = tuple(sorted(space.atom_weights, reverse=True))
    logging.debug(f"Passport: {len(rows)} rows, {len(atoms)} atoms")
    return Passport(rows, atoms)
