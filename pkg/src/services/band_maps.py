"""
Band maps: concrete Boolean homomorphisms between finitely-presented spaces.

A band map sends every source atom to a band (a non-empty set) of target atoms
and moves realized slots by finitely many increasing affine transfers
[a, a + l) -> [b, b + l') between unit intervals. Non-realized components are
matched symbolically by weight label.

The same object drives the induced algebra homomorphism Phi on functions
(`transport`), on events (`image`) and the pushed-forward measure's density
(`range_density`).
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from src.core.config import STRUCTURAL_RTOL
from src.core.errors import EmptyAlgebra, MalformedMap, NotMeasurePreserving
from src.spaces.intervals import IntervalSet, StepFunction
from src.spaces.logspace import LogFunction
from src.spaces.measure_algebra import (
    ALEPH_0,
    Atom,
    Density,
    Event,
    HomogeneousComponent,
    MeasureAlgebra,
    WeightLabel,
    close,
    validate_event,
)

# windows produced by float arithmetic may miss [0, 1) by this much
_WINDOW_SLACK = 1e-12


@dataclass(frozen=True)
class Transfer:
    """Increasing affine map of [source_start, +source_length) in a source slot
    onto [target_start, +target_length) in a target slot."""

    source_slot: int
    source_start: float
    source_length: float
    target_slot: int
    target_start: float
    target_length: float

    def __post_init__(self):
        if not (self.source_length > 0 and self.target_length > 0):
            raise MalformedMap("transfer segments must have positive length")
        for start, length in ((self.source_start, self.source_length),
                              (self.target_start, self.target_length)):
            if start < -_WINDOW_SLACK or start + length > 1.0 + _WINDOW_SLACK:
                raise MalformedMap(f"segment [{start}, {start + length}) is not inside [0, 1)")

    @property
    def source_end(self) -> float:
        return self.source_start + self.source_length

    @property
    def target_end(self) -> float:
        return self.target_start + self.target_length

    def to_target(self, x: float) -> float:
        return self.target_start + (x - self.source_start) * self.target_length / self.source_length

    def to_source(self, y: float) -> float:
        return self.source_start + (y - self.target_start) * self.source_length / self.target_length

    def reversed(self) -> "Transfer":
        return Transfer(self.target_slot, self.target_start, self.target_length,
                        self.source_slot, self.source_start, self.source_length)


@dataclass(frozen=True)
class SymbolicMatch:
    """Non-realized components of one weight label, matched as a whole."""

    weight_label: WeightLabel
    source_components: Tuple[int, ...]
    target_components: Tuple[int, ...]
    source_measure: float
    target_measure: float


def _covers_unit(windows: Iterable[Tuple[float, float]], tol: float = 1e-9) -> bool:
    """True when the [start, end) windows tile [0, 1) without gaps or overlaps."""
    cursor = 0.0
    for start, end in sorted(windows):
        if abs(start - cursor) > tol:
            return False
        cursor = end
    return abs(cursor - 1.0) <= tol


def _pairwise_disjoint(windows: Iterable[Tuple[float, float]], tol: float = 1e-9) -> bool:
    ordered = sorted(windows)
    return all(b0 <= a1 + tol for (_, b0), (a1, _) in zip(ordered, ordered[1:]))


@dataclass(frozen=True)
class BandMap:
    source: MeasureAlgebra
    target: MeasureAlgebra
    atom_images: Tuple[FrozenSet[int], ...]
    transfers: Tuple[Transfer, ...] = ()
    symbolic: Tuple[SymbolicMatch, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "atom_images", tuple(frozenset(s) for s in self.atom_images))
        object.__setattr__(self, "transfers", tuple(self.transfers))
        if len(self.atom_images) != self.source.n_atoms:
            raise MalformedMap(
                f"{len(self.atom_images)} atom images for {self.source.n_atoms} source atoms")
        for i, image in enumerate(self.atom_images):
            if any(not 0 <= j < self.target.n_atoms for j in image):
                raise MalformedMap(f"atom {i} is sent outside the {self.target.n_atoms} target atoms")
        for t in self.transfers:
            if not 0 <= t.source_slot < self.source.n_slots:
                raise MalformedMap(f"transfer from unknown source slot {t.source_slot}")
            if not 0 <= t.target_slot < self.target.n_slots:
                raise MalformedMap(f"transfer into unknown target slot {t.target_slot}")

    # ---------- structure ----------

    @property
    def atom_map(self) -> Optional[Tuple[int, ...]]:
        """Source atom -> target atom when every image is a single atom."""
        if all(len(image) == 1 for image in self.atom_images):
            return tuple(next(iter(image)) for image in self.atom_images)
        return None

    def transfers_from(self, slot: int) -> List[Transfer]:
        return [t for t in self.transfers if t.source_slot == slot]

    def transfers_into(self, slot: int) -> List[Transfer]:
        return [t for t in self.transfers if t.target_slot == slot]

    def is_total(self) -> bool:
        """Every source atom has a non-empty image and every source slot is tiled."""
        if any(not image for image in self.atom_images):
            return False
        return all(_covers_unit((t.source_start, t.source_end) for t in self.transfers_from(s))
                   for s in range(self.source.n_slots))

    def is_injective(self) -> bool:
        seen = set()
        for image in self.atom_images:
            if not image or seen & image:
                return False
            seen |= image
        for slot in range(self.target.n_slots):
            if not _pairwise_disjoint((t.target_start, t.target_end)
                                      for t in self.transfers_into(slot)):
                return False
        return all(_pairwise_disjoint((t.source_start, t.source_end) for t in self.transfers_from(s))
                   for s in range(self.source.n_slots))

    def is_surjective(self) -> bool:
        """Onto the whole target algebra: atoms are matched one-to-one and slots tiled."""
        mapped = self.atom_map
        if mapped is None or sorted(mapped) != list(range(self.target.n_atoms)):
            return False
        return all(_covers_unit((t.target_start, t.target_end) for t in self.transfers_into(s))
                   for s in range(self.target.n_slots))

    # ---------- action ----------

    def range_event(self) -> Event:
        atoms = frozenset().union(*self.atom_images) if self.atom_images else frozenset()
        parts = []
        for slot in range(self.target.n_slots):
            window = IntervalSet.empty()
            for t in self.transfers_into(slot):
                window = window.union(IntervalSet(((max(0.0, t.target_start),
                                                    min(1.0, t.target_end)),)))
            parts.append(window)
        return Event(atoms, tuple(parts))

    def image(self, e: Event) -> Event:
        """phi(e) for an event of the source."""
        validate_event(self.source, e)
        atoms = frozenset().union(*(self.atom_images[i] for i in e.atoms)) if e.atoms else frozenset()
        parts = [IntervalSet.empty() for _ in range(self.target.n_slots)]
        for t in self.transfers:
            moved = e.part(t.source_slot).affine_image(
                t.source_start, t.source_length, t.target_start, t.target_length)
            parts[t.target_slot] = parts[t.target_slot].union(moved)
        return Event(atoms, tuple(parts))

    def _slot_function(self, slot: int, source_steps: Sequence[StepFunction]) -> StepFunction:
        incoming = self.transfers_into(slot)
        points = {0.0, 1.0}
        for t in incoming:
            points.update((t.target_start, t.target_end))
            points.update(t.to_target(b) for b in source_steps[t.source_slot].breaks
                          if t.source_start < b < t.source_end)
        points = sorted(p for p in points if 0.0 <= p <= 1.0)
        values = []
        for a, b in zip(points, points[1:]):
            mid = (a + b) / 2
            value = 0.0
            for t in incoming:
                if t.target_start <= mid < t.target_end:
                    value = source_steps[t.source_slot].value_at(t.to_source(mid))
                    break
            values.append(value)
        return StepFunction(tuple(points), tuple(values)).simplified()

    def transport(self, f: LogFunction) -> LogFunction:
        """Phi(f): relabel atom values and rearrange step functions; zero off the range."""
        if f.space != self.source:
            raise MalformedMap("function does not live on the map's source space")
        atoms = [0.0] * self.target.n_atoms
        for i, image in enumerate(self.atom_images):
            for j in image:
                atoms[j] = f.atom_values[i]
        parts = tuple(self._slot_function(slot, f.step_parts) for slot in range(self.target.n_slots))
        return LogFunction(self.target, tuple(atoms), parts)

    # ---------- algebra of maps ----------

    def inverse(self) -> "BandMap":
        """Inverse on the range; target atoms outside the range get empty images."""
        mapped = self.atom_map
        if mapped is None:
            raise MalformedMap("only maps sending atoms to single atoms can be inverted")
        images = [frozenset() for _ in range(self.target.n_atoms)]
        for i, j in enumerate(mapped):
            images[j] = frozenset({i})
        symbolic = tuple(SymbolicMatch(s.weight_label, s.target_components, s.source_components,
                                       s.target_measure, s.source_measure) for s in self.symbolic)
        return BandMap(self.target, self.source, tuple(images),
                       tuple(t.reversed() for t in self.transfers), symbolic)


def compose(outer: BandMap, inner: BandMap) -> BandMap:
    """outer after inner."""
    if inner.target != outer.source:
        raise MalformedMap("band maps do not chain: inner target differs from outer source")
    images = tuple(frozenset().union(*(outer.atom_images[j] for j in image)) if image else frozenset()
                   for image in inner.atom_images)
    transfers = []
    for first in inner.transfers:
        for second in outer.transfers_from(first.target_slot):
            lo = max(first.target_start, second.source_start)
            hi = min(first.target_end, second.source_end)
            if hi <= lo:
                continue
            x_lo, x_hi = first.to_source(lo), first.to_source(hi)
            y_lo, y_hi = second.to_target(lo), second.to_target(hi)
            if x_hi - x_lo <= 0 or y_hi - y_lo <= 0:
                continue
            transfers.append(Transfer(first.source_slot, x_lo, x_hi - x_lo,
                                      second.target_slot, y_lo, y_hi - y_lo))
    return BandMap(inner.source, outer.target, images, tuple(transfers))


def identity(space: MeasureAlgebra) -> BandMap:
    return BandMap(space, space, tuple(frozenset({i}) for i in range(space.n_atoms)),
                   tuple(Transfer(s, 0.0, 1.0, s, 0.0, 1.0) for s in range(space.n_slots)),
                   symbolic_matches(space, space))


def symbolic_matches(source: MeasureAlgebra, target: MeasureAlgebra) -> Tuple[SymbolicMatch, ...]:
    """Group the non-realized components of both sides by weight label."""
    def by_label(space: MeasureAlgebra) -> Dict[WeightLabel, List[int]]:
        groups: Dict[WeightLabel, List[int]] = {}
        for k, comp in enumerate(space.components):
            if not comp.realized:
                groups.setdefault(comp.weight_label, []).append(k)
        return groups

    left, right = by_label(source), by_label(target)
    matches = []
    for label in sorted(set(left) | set(right)):
        ls, rs = tuple(left.get(label, ())), tuple(right.get(label, ()))
        matches.append(SymbolicMatch(
            label, ls, rs,
            math.fsum(source.components[k].measure for k in ls),
            math.fsum(target.components[k].measure for k in rs)))
    return tuple(matches)


def range_density(phi: BandMap) -> Density:
    """d(lambda)/d(mu_2) where lambda(phi(e)) = mu_1(e), on the range of phi."""
    source, target = phi.source, phi.target
    atom_ratios = [0.0] * target.n_atoms
    for i, image in enumerate(phi.atom_images):
        if not image:
            continue
        mass = math.fsum(target.atoms[j].weight for j in image)
        for j in image:
            atom_ratios[j] = source.atoms[i].weight / mass
    source_measures, target_measures = source.slot_measures, target.slot_measures
    piece_ratios = []
    for slot in range(target.n_slots):
        incoming = phi.transfers_into(slot)
        points = sorted({0.0, 1.0, *(p for t in incoming for p in (t.target_start, t.target_end)
                                     if 0.0 < p < 1.0)})
        values = []
        for a, b in zip(points, points[1:]):
            mid = (a + b) / 2
            value = 0.0
            for t in incoming:
                if t.target_start <= mid < t.target_end:
                    value = (source_measures[t.source_slot] * t.source_length) / (
                        target_measures[slot] * t.target_length)
                    break
            values.append(value)
        piece_ratios.append(StepFunction(tuple(points), tuple(values)).simplified())
    return Density(tuple(atom_ratios), tuple(piece_ratios), band=phi.range_event())


# ==================== VALIDATED SUBCLASSES ====================

@dataclass(frozen=True)
class InducedHomomorphism(BandMap):
    """An injective, total band map: the homomorphism Phi with range_event Phi(1)."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_total():
            raise MalformedMap("homomorphism must be defined on every atom and tile every source slot")
        if not self.is_injective():
            raise MalformedMap("homomorphism must be injective (disjoint images)")

    @classmethod
    def of(cls, band_map: BandMap) -> "InducedHomomorphism":
        return cls(band_map.source, band_map.target, band_map.atom_images,
                   band_map.transfers, band_map.symbolic)


@dataclass(frozen=True)
class MeasurePreservingIso(BandMap):
    """
    A Boolean isomorphism (atom bijection, tiled slots on both sides, label-matched
    symbolic components). Measure preservation is checked by `check_measure_preserving`.
    """

    def __post_init__(self):
        super().__post_init__()
        if self.atom_map is None or sorted(self.atom_map) != list(range(self.target.n_atoms)):
            raise MalformedMap("atom map must be a bijection between source and target atoms")
        if not (self.is_total() and self.is_surjective() and self.is_injective()):
            raise MalformedMap("slot segments must tile the unit interval on both sides")

    @classmethod
    def from_component_map(cls, source: MeasureAlgebra, target: MeasureAlgebra,
                           atom_map: Sequence[int], component_map: Sequence[int] = (),
                           rearrangements: Optional[Sequence[Sequence[Tuple[float, float, float]]]] = None
                           ) -> "MeasurePreservingIso":
        """
        Compile the slot bijection form: component_map[s] is the target slot of
        source slot s, rearrangements[s] lists (from, to, length) translations.
        """
        if len(component_map) != source.n_slots:
            raise MalformedMap(f"component map has {len(component_map)} entries, "
                               f"source has {source.n_slots} realized components")
        if sorted(component_map) != list(range(target.n_slots)):
            raise MalformedMap("component map must be a bijection between realized components")
        transfers = []
        for s, t in enumerate(component_map):
            segments = rearrangements[s] if rearrangements and s < len(rearrangements) else None
            for start, to, length in segments or [(0.0, 0.0, 1.0)]:
                transfers.append(Transfer(s, float(start), float(length), t, float(to), float(length)))
        return cls(source, target, tuple(frozenset({int(j)}) for j in atom_map),
                   tuple(transfers), symbolic_matches(source, target))


def check_measure_preserving(phi: BandMap, tol: float = STRUCTURAL_RTOL) -> None:
    """Raise NotMeasurePreserving unless mu_2(phi(e)) = mu_1(e) on atoms, segments and labels."""
    for i, image in enumerate(phi.atom_images):
        w1 = phi.source.atoms[i].weight
        w2 = math.fsum(phi.target.atoms[j].weight for j in image)
        if not close(w1, w2, tol):
            raise NotMeasurePreserving(f"atom {i} has weight {w1!r} but its image weighs {w2!r}")
    source_measures, target_measures = phi.source.slot_measures, phi.target.slot_measures
    for t in phi.transfers:
        m1 = source_measures[t.source_slot] * t.source_length
        m2 = target_measures[t.target_slot] * t.target_length
        if not close(m1, m2, tol):
            raise NotMeasurePreserving(
                f"segment of slot {t.source_slot} carries {m1!r} but its image carries {m2!r}")
    for match in phi.symbolic:
        if not close(match.source_measure, match.target_measure, tol):
            raise NotMeasurePreserving(
                f"{match.weight_label} components carry {match.source_measure!r} "
                f"vs {match.target_measure!r}")


def relativize(space: MeasureAlgebra, e: Event) -> Tuple[MeasureAlgebra, BandMap]:
    """
    The relativized algebra e . space as a stand-alone space, plus its
    measure-preserving embedding into space. Each touched slot becomes one
    realized component whose unit interval is laid along the pieces of e.
    """
    validate_event(space, e)
    atom_indices = sorted(e.atoms)
    components = []
    transfers = []
    measures = space.slot_measures
    for slot in range(space.n_slots):
        part = e.part(slot)
        if part.is_empty():
            continue
        new_slot = len(components)
        components.append(HomogeneousComponent(ALEPH_0, measures[slot] * part.length))
        cursor = 0.0
        for a, b in part.pieces:
            share = (b - a) / part.length
            transfers.append(Transfer(new_slot, cursor, share, slot, a, b - a))
            cursor += share
        last = transfers[-1]
        # pin the tiling to exactly 1 so the sub-slot is covered without a gap
        transfers[-1] = replace(last, source_length=1.0 - last.source_start)
    if not atom_indices and not components:
        raise EmptyAlgebra("cannot relativize to the zero event")
    sub = MeasureAlgebra(tuple(Atom(space.atoms[i].weight) for i in atom_indices), tuple(components))
    embedding = BandMap(sub, space, tuple(frozenset({i}) for i in atom_indices), tuple(transfers))
    logging.debug(f"Relativized {space.describe()} to {sub.describe()}")
    return sub, embedding


def describe(phi: BandMap) -> dict:
    """JSON-ready description of a band map."""
    return {
        "atom_map": list(phi.atom_map) if phi.atom_map is not None else None,
        "atom_images": [sorted(image) for image in phi.atom_images],
        "transfers": [
            {"source_slot": t.source_slot, "source_start": t.source_start,
             "source_length": t.source_length, "target_slot": t.target_slot,
             "target_start": t.target_start, "target_length": t.target_length}
            for t in phi.transfers
        ],
        "symbolic": [
            {"weight_label": m.weight_label.name, "source_components": list(m.source_components),
             "target_components": list(m.target_components), "measure": m.source_measure}
            for m in phi.symbolic
        ],
    }
