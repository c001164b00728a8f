"""
Seeded random generators for spaces, events, functions and maps.

Every generator takes a numpy Generator so that suites and tests are
reproducible from a single seed.
"""

from typing import List, Tuple

import numpy as np

from src.services.band_maps import MeasurePreservingIso
from src.spaces.intervals import IntervalSet, StepFunction
from src.spaces.logspace import LogFunction
from src.spaces.measure_algebra import (
    ALEPH_0,
    Atom,
    Event,
    HomogeneousComponent,
    MeasureAlgebra,
    WeightLabel,
)

MASS_RANGE = (0.05, 2.0)


def random_lengths(rng: np.random.Generator, k: int) -> List[float]:
    """k positive lengths summing to 1."""
    lengths = rng.dirichlet(np.ones(k))
    lengths = [float(x) for x in lengths]
    lengths[-1] = 1.0 - sum(lengths[:-1])
    return lengths


def random_values(rng: np.random.Generator, n: int) -> np.ndarray:
    """Signed values spread over six decades, about one in five exactly zero."""
    magnitudes = 10.0 ** rng.uniform(-3.0, 3.0, n)
    signs = rng.choice([-1.0, 1.0], n)
    return np.where(rng.random(n) < 0.2, 0.0, signs * magnitudes)


def random_space(rng: np.random.Generator, max_atoms: int = 6, max_slots: int = 2,
                 unrealized: bool = False) -> MeasureAlgebra:
    n_atoms = int(rng.integers(0, max_atoms + 1))
    n_slots = int(rng.integers(0, max_slots + 1))
    if n_atoms == 0 and n_slots == 0:
        n_atoms = 1
    atoms = tuple(Atom(float(w)) for w in rng.uniform(*MASS_RANGE, n_atoms))
    components = [HomogeneousComponent(ALEPH_0, float(m))
                  for m in rng.uniform(*MASS_RANGE, n_slots)]
    if unrealized and rng.random() < 0.5:
        label = WeightLabel(int(rng.integers(1, 3)))
        components.append(HomogeneousComponent(label, float(rng.uniform(*MASS_RANGE))))
    return MeasureAlgebra(atoms, tuple(components))


def random_atomic_space(rng: np.random.Generator, n_atoms: int) -> MeasureAlgebra:
    return MeasureAlgebra(tuple(Atom(float(w)) for w in rng.uniform(*MASS_RANGE, n_atoms)), ())


def random_step(rng: np.random.Generator, max_pieces: int = 4) -> StepFunction:
    k = int(rng.integers(1, max_pieces + 1))
    return StepFunction.from_lengths(zip(random_lengths(rng, k), random_values(rng, k)))


def random_function(rng: np.random.Generator, space: MeasureAlgebra,
                    max_pieces: int = 4) -> LogFunction:
    atoms = tuple(float(v) for v in random_values(rng, space.n_atoms))
    parts = tuple(random_step(rng, max_pieces) for _ in range(space.n_slots))
    return LogFunction(space, atoms, parts)


def random_intervals(rng: np.random.Generator, max_pieces: int = 3) -> IntervalSet:
    if rng.random() < 0.25:
        return IntervalSet.empty()
    k = int(rng.integers(1, max_pieces + 1))
    points = np.sort(rng.uniform(0.0, 1.0, 2 * k))
    return IntervalSet.from_pairs(zip(points[0::2], points[1::2]))


def random_event(rng: np.random.Generator, space: MeasureAlgebra, max_pieces: int = 3) -> Event:
    atoms = frozenset(i for i in range(space.n_atoms) if rng.random() < 0.5)
    parts = tuple(random_intervals(rng, max_pieces) for _ in range(space.n_slots))
    return Event(atoms, parts)


def random_interval_exchange(rng: np.random.Generator,
                             max_segments: int = 3) -> List[Tuple[float, float, float]]:
    """(from, to, length) segments of a random interval exchange of [0, 1)."""
    k = int(rng.integers(1, max_segments + 1))
    lengths = random_lengths(rng, k)
    starts = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    order = rng.permutation(k)
    targets = np.zeros(k)
    cursor = 0.0
    for position in order:
        targets[position] = cursor
        cursor += lengths[position]
    return [(float(a), float(b), float(l)) for a, b, l in zip(starts, targets, lengths)]


def random_iso(rng: np.random.Generator, space: MeasureAlgebra,
               max_segments: int = 3) -> MeasurePreservingIso:
    """A measure-preserving isomorphism onto a shuffled copy of space."""
    atom_map = [int(j) for j in rng.permutation(space.n_atoms)]
    target_atoms = [None] * space.n_atoms
    for i, j in enumerate(atom_map):
        target_atoms[j] = space.atoms[i]
    slot_map = [int(t) for t in rng.permutation(space.n_slots)]
    realized = [space.components[k] for k in space.realized_slots]
    target_realized = [None] * space.n_slots
    for s, t in enumerate(slot_map):
        target_realized[t] = realized[s]
    rest = [c for c in space.components if not c.realized]
    target = MeasureAlgebra(tuple(target_atoms), tuple(target_realized + rest))
    rearrangements = [random_interval_exchange(rng, max_segments) for _ in range(space.n_slots)]
    return MeasurePreservingIso.from_component_map(space, target, atom_map, slot_map, rearrangements)


def random_signs(rng: np.random.Generator, n: int) -> Tuple[float, ...]:
    return tuple(float(s) for s in rng.choice([-1.0, 1.0], n))


def mixing_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    """A doubly-stochastic matrix that is not a permutation matrix (n >= 2)."""
    if n < 2:
        raise ValueError("mixing needs at least two atoms")
    first = rng.permutation(n)
    perms = [first, np.roll(first, int(rng.integers(1, n)))]
    perms += [rng.permutation(n) for _ in range(int(rng.integers(0, 2)))]
    weights = rng.dirichlet(np.ones(len(perms)))
    matrix = np.zeros((n, n))
    for weight, perm in zip(weights, perms):
        matrix[perm, np.arange(n)] += weight
    return matrix
