"""
Linear isometries of L_log spaces in multiplier-times-homomorphism form.

Every isometry is stored as U(f) = u * Phi(f), where Phi is the homomorphism
induced by a band map and u = U(1) lives on the target. Construction from a
measure-preserving isomorphism, decomposition of atomic matrices, restriction,
inversion and composition all produce this same shape.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.core.config import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    NORM_ATOL,
    POINTWISE_ATOL,
    STRUCTURAL_RTOL,
    SUPPORT_ATOL,
)
from src.core.errors import (
    NORM_PRESERVATION,
    DegenerateColumn,
    DisjointnessViolation,
    FormulaViolation,
    MalformedEvent,
    MalformedMap,
    MeasureMismatch,
    NotSurjective,
    SpaceMismatch,
    StructureMismatch,
)
from src.services.band_maps import (
    BandMap,
    InducedHomomorphism,
    MeasurePreservingIso,
    check_measure_preserving,
    compose as compose_maps,
    range_density,
    relativize,
)
from src.spaces.intervals import StepFunction
from src.spaces.logspace import (
    LogFunction,
    absolute,
    constant,
    density_function,
    fnorm,
    max_abs_difference,
    pointwise_multiply,
    restrict as restrict_function,
    zero,
)
from src.spaces.measure_algebra import (
    Density,
    Event,
    MeasureAlgebra,
    close,
    same_structure,
    validate_event,
)
from src.utils.sampling import random_function


@dataclass(frozen=True)
class LinearMapTable:
    """Matrix of a linear map between atomic spaces: (Uf)_j = sum_i matrix[j][i] * f_i."""

    source: MeasureAlgebra
    target: MeasureAlgebra
    matrix: Tuple[Tuple[float, ...], ...]

    def __post_init__(self):
        if not (self.source.is_atomic() and self.target.is_atomic()):
            raise StructureMismatch("linear map tables are only defined between atomic spaces")
        rows = tuple(tuple(float(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        if len(rows) != self.target.n_atoms or any(len(r) != self.source.n_atoms for r in rows):
            raise MalformedMap(
                f"matrix must be {self.target.n_atoms} x {self.source.n_atoms} (target x source atoms)")
        if not all(math.isfinite(v) for row in rows for v in row):
            raise MalformedMap("matrix entries must be finite")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float).reshape(self.target.n_atoms, self.source.n_atoms)

    def apply(self, f: LogFunction) -> LogFunction:
        if f.space != self.source:
            raise SpaceMismatch("function does not live on the table's source space")
        values = self.array @ np.array(f.atom_values, dtype=float)
        return LogFunction(self.target, tuple(float(v) for v in values), ())


@dataclass(frozen=True)
class LogIsometry:
    phi: BandMap
    multiplier: LogFunction
    lambda_density: Density

    def __post_init__(self):
        if self.multiplier.space != self.phi.target:
            raise SpaceMismatch("multiplier must live on the homomorphism's target")

    @property
    def source(self) -> MeasureAlgebra:
        return self.phi.source

    @property
    def target(self) -> MeasureAlgebra:
        return self.phi.target

    @property
    def range_event(self) -> Event:
        return self.phi.range_event()


@dataclass(frozen=True)
class IsometryReport:
    passed: bool
    max_deviation: float
    trials: int
    violated_property: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "max_deviation": self.max_deviation,
            "trials": self.trials,
            "violated_property": self.violated_property,
        }


@dataclass(frozen=True)
class RangeCertificate:
    onto: bool
    sup: float
    inf: float
    bounded: bool
    surjective: bool

    def to_dict(self) -> dict:
        return {"onto": self.onto, "sup": self.sup, "inf": self.inf,
                "bounded": self.bounded, "surjective": self.surjective}


# ==================== CONSTRUCTION ====================

def _sign_function(phi: BandMap, atom_signs: Optional[Sequence[float]],
                   segment_signs: Optional[Sequence[float]]) -> LogFunction:
    """Source-side function carrying one sign per atom and one per transfer segment."""
    source = phi.source
    atoms = tuple(float(s) for s in atom_signs) if atom_signs is not None else (1.0,) * source.n_atoms
    if len(atoms) != source.n_atoms:
        raise MalformedMap(f"{len(atoms)} signs for {source.n_atoms} source atoms")
    if segment_signs is not None and len(segment_signs) != len(phi.transfers):
        raise MalformedMap(f"{len(segment_signs)} segment signs for {len(phi.transfers)} segments")
    if any(abs(s) != 1.0 for s in atoms) or any(abs(s) != 1.0 for s in segment_signs or ()):
        raise MalformedMap("signs must be +1 or -1")
    parts = []
    for slot in range(source.n_slots):
        if segment_signs is None:
            parts.append(StepFunction.constant(1.0))
            continue
        segments = sorted((t.source_start, k) for k, t in enumerate(phi.transfers) if t.source_slot == slot)
        points = [0.0, *(start for start, _ in segments[1:]), 1.0]
        values = [float(segment_signs[k]) for _, k in segments]
        parts.append(StepFunction(tuple(points), tuple(values)).simplified())
    return LogFunction(source, atoms, tuple(parts))


def build_from_measure_preserving(iso: MeasurePreservingIso,
                                  atom_signs: Optional[Sequence[float]] = None,
                                  segment_signs: Optional[Sequence[float]] = None,
                                  tol: float = STRUCTURAL_RTOL) -> LogIsometry:
    """
    The isometry f -> s * Phi(f) of a measure-preserving isomorphism. Without
    signs it is the positive isometry with multiplier 1.
    """
    check_measure_preserving(iso, tol)
    multiplier = iso.transport(_sign_function(iso, atom_signs, segment_signs))
    logging.info(f"Built isometry on {iso.source.describe()}")
    return LogIsometry(iso, multiplier, range_density(iso))


def apply(U: LogIsometry, f: LogFunction) -> LogFunction:
    if f.space != U.source:
        raise SpaceMismatch("function does not live on the isometry's source space")
    return pointwise_multiply(U.multiplier, U.phi.transport(f))


def signs_of(U: LogIsometry) -> Tuple[float, ...]:
    """Sign of the multiplier on the (first) image atom of each source atom."""
    signs = []
    for image in U.phi.atom_images:
        value = U.multiplier.atom_values[min(image)] if image else 0.0
        signs.append(math.copysign(1.0, value) if value else 0.0)
    return tuple(signs)


def formula_residual(U: LogIsometry) -> float:
    """max | |u| + 1 - 2 d(lambda)/d(mu_2) | over the range of Phi."""
    target = U.target
    gap = absolute(U.multiplier) + constant(target, 1.0) \
        - 2.0 * density_function(target, U.lambda_density)
    return max_abs_difference(restrict_function(gap, U.range_event), zero(target))


# ==================== VERIFICATION ====================

def verify_isometry(U: LogIsometry, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED,
                    tol: float = NORM_ATOL) -> IsometryReport:
    """Compare ||U f|| with ||f|| on seeded random functions; never raises for a failed check."""
    rng = np.random.default_rng(seed)
    deviations = []
    for _ in range(trials):
        f = random_function(rng, U.source)
        deviations.append(abs(fnorm(apply(U, f)).value - fnorm(f).value))
    worst = max(deviations, default=0.0)
    passed = worst < tol
    if not passed:
        logging.warning(f"verify_isometry: deviation {worst:.3e} over {trials} trials")
    return IsometryReport(passed, worst, trials, None if passed else NORM_PRESERVATION)


def matrix_of(U: LogIsometry) -> LinearMapTable:
    """The matrix of U on atomic spaces, column i being U(e_i)."""
    if not (U.source.is_atomic() and U.target.is_atomic()):
        raise StructureMismatch("matrix_of needs atomic source and target spaces")
    columns = []
    for i in range(U.source.n_atoms):
        e_i = LogFunction(U.source, tuple(1.0 if k == i else 0.0 for k in range(U.source.n_atoms)), ())
        columns.append(apply(U, e_i).atom_values)
    matrix = np.array(columns, dtype=float).T.reshape(U.target.n_atoms, U.source.n_atoms)
    return LinearMapTable(U.source, U.target, tuple(tuple(row) for row in matrix.tolist()))


def decompose(L: LinearMapTable, tol: float = STRUCTURAL_RTOL) -> LogIsometry:
    """
    Recover U = u * Phi from a matrix, validating each structural necessity in
    turn: non-zero columns, disjoint column supports, measure preservation of
    Phi and the multiplier/density identity.
    """
    matrix = L.array
    supports = []
    for i in range(L.source.n_atoms):
        rows = frozenset(int(j) for j in np.flatnonzero(np.abs(matrix[:, i]) > SUPPORT_ATOL))
        if not rows:
            raise DegenerateColumn(f"column {i} is zero: a nonzero function is sent to 0")
        supports.append(rows)
    for i in range(len(supports)):
        for k in range(i + 1, len(supports)):
            shared = supports[i] & supports[k]
            if shared:
                logging.info(f"decompose: columns {i} and {k} overlap on atoms {sorted(shared)}")
                raise DisjointnessViolation(
                    f"images of atoms {i} and {k} overlap on target atoms {sorted(shared)}, "
                    f"but disjoint functions must have disjoint images")
    phi = InducedHomomorphism(L.source, L.target, tuple(supports), ())
    for i, image in enumerate(supports):
        w1 = L.source.atoms[i].weight
        w2 = math.fsum(L.target.atoms[j].weight for j in image)
        if not close(w1, w2, tol):
            raise MeasureMismatch(
                f"atom {i} has measure {w1!r} but its image has measure {w2!r}")
    multiplier = LogFunction(L.target, tuple(float(v) for v in matrix.sum(axis=1)), ())
    U = LogIsometry(phi, multiplier, range_density(phi))
    residual = formula_residual(U)
    if residual > tol:
        raise FormulaViolation(f"|U(1)| differs from -1 + 2 d(lambda)/d(mu_2) by {residual!r}")
    logging.info(f"decompose: accepted {L.target.n_atoms}x{L.source.n_atoms} matrix")
    return U


# ==================== DERIVED ISOMETRIES ====================

def restrict(U: LogIsometry, e: Event) -> LogIsometry:
    """U acting on the relativized algebra e . source, landing in Phi(e) . target."""
    validate_event(U.source, e)
    if e.is_empty():
        raise MalformedEvent("cannot restrict to the zero event")
    sub_source, into_source = relativize(U.source, e)
    sub_target, into_target = relativize(U.target, U.phi.image(e))
    back = into_target.inverse()
    phi = compose_maps(back, compose_maps(U.phi, into_source))
    multiplier = back.transport(U.multiplier)
    return LogIsometry(phi, multiplier, range_density(phi))


def onto_range_check(phi: BandMap, mu1: Optional[MeasureAlgebra] = None,
                     mu2: Optional[MeasureAlgebra] = None) -> RangeCertificate:
    """
    Is Phi(L_log(mu1)) all of L_log(mu2)? Requires the range density and its
    reciprocal to be bounded and the map to be onto. mu1/mu2 re-weight the
    map's own spaces when given.

    The density is d(lambda)/d(mu2) with lambda(Phi(e)) = mu1(e): source mass
    over target mass. A bijection whose source carries twice the target's
    masses has sup = inf = 2.
    """
    source, target = mu1 or phi.source, mu2 or phi.target
    if not (same_structure(source, phi.source) and same_structure(target, phi.target)):
        raise StructureMismatch("measures do not match the homomorphism's spaces")
    weighted = BandMap(source, target, phi.atom_images, phi.transfers, phi.symbolic)
    density = range_density(weighted)
    sup, inf = density.sup(), density.inf()
    bounded = inf > 0.0 and math.isfinite(sup)
    surjective = weighted.is_surjective()
    return RangeCertificate(bounded and surjective, sup, inf, bounded, surjective)


def inverse(U: LogIsometry) -> LogIsometry:
    """U^-1(g) = Phi^-1(1/u) * Phi^-1(g)."""
    if not U.phi.is_surjective():
        raise NotSurjective("the isometry is not onto its target; only its range can be inverted")
    back = U.phi.inverse()
    if any(abs(v) <= POINTWISE_ATOL for v in U.multiplier.atom_values) or any(
            abs(v) <= POINTWISE_ATOL for step in U.multiplier.step_parts for v in step.values):
        raise FormulaViolation("multiplier vanishes on part of a full range")
    reciprocal = LogFunction(U.target, tuple(1.0 / v for v in U.multiplier.atom_values),
                             tuple(step.map(lambda v: 1.0 / v) for step in U.multiplier.step_parts))
    return LogIsometry(back, back.transport(reciprocal), range_density(back))


def compose(U2: LogIsometry, U1: LogIsometry) -> LogIsometry:
    """U2 after U1: u2 * Phi2(u1) * (Phi2 o Phi1)(f)."""
    if U1.target != U2.source:
        raise SpaceMismatch("isometries do not chain: first target differs from second source")
    phi = compose_maps(U2.phi, U1.phi)
    multiplier = pointwise_multiply(U2.multiplier, U2.phi.transport(U1.multiplier))
    return LogIsometry(phi, multiplier, range_density(phi))
