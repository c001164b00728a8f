"""
Isometric classification of L_log spaces.

Two spaces carry isometric L_log spaces exactly when a measure-preserving
isomorphism joins their algebras: equal totals, equal atom multisets and equal
passport rows. Positive answers come with that isomorphism, negative ones with
the first failing invariant; a total-measure mismatch also carries a numeric
separation certificate.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from src.core.config import (
    BRUTE_FORCE_MAX_ATOMS,
    EXTENSION_ATOMIC_MATCHING,
    EXTENSION_MIXED_SPACES,
    NORM_ATOL,
    SEPARATION_LAMBDA_MAX,
    STRUCTURAL_RTOL,
)
from src.core.errors import (
    EqualTotals,
    InvalidParameter,
    SpaceMismatch,
    StructureMismatch,
    TooLarge,
)
from src.services.band_maps import (
    BandMap,
    MeasurePreservingIso,
    Transfer,
    describe,
    range_density,
    symbolic_matches,
)
from src.services.isometry import LinearMapTable, LogIsometry, apply
from src.spaces.logspace import constant, fnorm, indicator
from src.spaces.measure_algebra import (
    MeasureAlgebra,
    canonical_atom_order,
    close,
    passport,
    total_measure,
)


@dataclass(frozen=True)
class SeparationCertificate:
    t: float
    lambda_star: Optional[float]
    mu_total: float
    nu_total: float
    lam: Optional[float] = None
    lhs: Optional[float] = None
    rhs: Optional[float] = None

    @property
    def separated(self) -> bool:
        return self.lhs is not None and self.rhs is not None and abs(self.lhs - self.rhs) > NORM_ATOL

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "lambda_star": self.lambda_star,
            "lambda": self.lam,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "mu_total": self.mu_total,
            "nu_total": self.nu_total,
            "separated": self.separated,
        }


@dataclass(frozen=True)
class TotalMeasureMismatch:
    certificate: SeparationCertificate
    kind: str = field(default="TotalMeasureMismatch", init=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.certificate.to_dict()}


@dataclass(frozen=True)
class AtomMultisetMismatch:
    diff: Tuple[dict, ...]
    kind: str = field(default="AtomMultisetMismatch", init=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "diff": list(self.diff)}


@dataclass(frozen=True)
class PassportMismatch:
    diff: Tuple[dict, ...]
    kind: str = field(default="PassportMismatch", init=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "diff": list(self.diff)}


Refutation = Union[TotalMeasureMismatch, AtomMultisetMismatch, PassportMismatch]


@dataclass(frozen=True)
class Decision:
    isometric: bool
    witness: Optional[MeasurePreservingIso] = None
    refutation: Optional[Refutation] = None
    extensions_used: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.isometric != (self.witness is not None) or self.isometric == (self.refutation is not None):
            raise ValueError("a decision carries a witness iff isometric, a refutation otherwise")

    def to_dict(self) -> dict:
        return {
            "isometric": self.isometric,
            "witness": describe(self.witness) if self.witness is not None else None,
            "refutation": self.refutation.to_dict() if self.refutation is not None else None,
            "extensions_used": list(self.extensions_used),
        }


# ==================== SEPARATION ====================

def separating_lambda(mu_total: float, nu_total: float, norm_U1: float,
                      tol: float = STRUCTURAL_RTOL) -> SeparationCertificate:
    """
    Threshold beyond which ||lambda * 1|| cannot be preserved. When t < 1 the
    roles of the two spaces are swapped, as for the inverse isometry.
    """
    if norm_U1 < 0:
        raise InvalidParameter(f"norm of U(1) must be non-negative, got {norm_U1!r}")
    if close(mu_total, nu_total, tol):
        raise EqualTotals(f"totals {mu_total!r} and {nu_total!r} agree; no separation exists")
    t = nu_total / mu_total
    t_prime = max(t, 1.0 / t)
    m = min(mu_total, nu_total)
    try:
        lambda_star = math.expm1(norm_U1 / ((t_prime - 1.0) * m))
    except OverflowError:
        lambda_star = math.inf
    return SeparationCertificate(t, lambda_star, mu_total, nu_total)


def candidate_map(source: MeasureAlgebra, target: MeasureAlgebra) -> LogIsometry:
    """
    The best-matching positive map from source to target: atoms paired by
    descending weight, realized slots paired by position, the rest sent to 0.
    """
    order_s, order_t = canonical_atom_order(source), canonical_atom_order(target)
    images = [frozenset() for _ in range(source.n_atoms)]
    for i, j in zip(order_s, order_t):
        images[i] = frozenset({j})
    transfers = tuple(Transfer(s, 0.0, 1.0, s, 0.0, 1.0)
                      for s in range(min(source.n_slots, target.n_slots)))
    phi = BandMap(source, target, tuple(images), transfers)
    return LogIsometry(phi, indicator(target, phi.range_event()), range_density(phi))


def verify_separation(S_mu: MeasureAlgebra, S_nu: MeasureAlgebra,
                      candidate: Union[LogIsometry, LinearMapTable], lam: float,
                      tol: float = STRUCTURAL_RTOL) -> SeparationCertificate:
    """
    lhs = ||lam * 1|| under nu, rhs = ||candidate(lam * 1)|| under mu, for a
    candidate mapping L_log(nu) into L_log(mu).
    """
    if candidate.source != S_nu or candidate.target != S_mu:
        raise SpaceMismatch("candidate must map the nu-space into the mu-space")
    if not (math.isfinite(lam) and lam > 0):
        raise InvalidParameter(f"lambda must be positive and finite, got {lam!r}")
    mu_total, nu_total = total_measure(S_mu), total_measure(S_nu)
    lhs = nu_total * math.log1p(lam)
    if isinstance(candidate, LinearMapTable):
        image, unit_image = candidate.apply(constant(S_nu, lam)), candidate.apply(constant(S_nu, 1.0))
    else:
        image, unit_image = apply(candidate, constant(S_nu, lam)), apply(candidate, constant(S_nu, 1.0))
    rhs = fnorm(image).value
    lambda_star = None
    if not close(mu_total, nu_total, tol):
        lambda_star = separating_lambda(mu_total, nu_total, fnorm(unit_image).value, tol).lambda_star
    return SeparationCertificate(nu_total / mu_total, lambda_star, mu_total, nu_total, lam, lhs, rhs)


def default_lambda(lambda_star: float) -> float:
    """2 lambda* + 1, capped at SEPARATION_LAMBDA_MAX once lambda* overflows."""
    return min(2.0 * lambda_star + 1.0, SEPARATION_LAMBDA_MAX)


def total_measure_certificate(S1: MeasureAlgebra, S2: MeasureAlgebra,
                              tol: float = STRUCTURAL_RTOL) -> SeparationCertificate:
    """
    Certificate for totals that differ: any isometry from the larger-total
    space must have ||U(1)|| = (larger total) * ln 2; lambda = 2 lambda* + 1
    then separates against the best-matching candidate. Close totals push
    lambda* past the float range; the capped lambda still leaves a gap of
    (larger total - smaller total) * ln(1 + lambda).
    """
    mu_total, nu_total = total_measure(S1), total_measure(S2)
    big, small = (S2, S1) if nu_total > mu_total else (S1, S2)
    forced_norm = max(mu_total, nu_total) * math.log(2.0)
    threshold = separating_lambda(mu_total, nu_total, forced_norm, tol)
    lam = default_lambda(threshold.lambda_star)
    check = verify_separation(small, big, candidate_map(big, small), lam, tol)
    return SeparationCertificate(threshold.t, threshold.lambda_star, mu_total, nu_total,
                                 lam, check.lhs, check.rhs)


# ==================== WITNESSES ====================

def _cuts(measures: List[float]) -> List[Fraction]:
    exact = [Fraction(m) for m in measures]
    total = sum(exact)
    cuts, running = [Fraction(0)], Fraction(0)
    for m in exact:
        running += m
        cuts.append(running / total)
    return cuts


def match_slots(source: MeasureAlgebra, target: MeasureAlgebra) -> Tuple[Transfer, ...]:
    """
    Water-fill the realized slots of source into those of target: both lists
    are laid end to end on a normalized axis and cut at every boundary.

    Cuts are exact rationals, so every slot of positive measure, however
    small, keeps its own segments.
    """
    if not source.n_slots or not target.n_slots:
        return ()
    a, b = _cuts(list(source.slot_measures)), _cuts(list(target.slot_measures))
    points = sorted(set(a) | set(b))
    transfers = []
    s = t = 0
    for p, q in zip(points, points[1:]):
        while a[s + 1] <= p:
            s += 1
        while b[t + 1] <= p:
            t += 1
        a_width, b_width = a[s + 1] - a[s], b[t + 1] - b[t]
        transfers.append(Transfer(s, float((p - a[s]) / a_width), float((q - p) / a_width),
                                  t, float((p - b[t]) / b_width), float((q - p) / b_width)))
    return tuple(transfers)


def witness_iso(S1: MeasureAlgebra, S2: MeasureAlgebra) -> MeasurePreservingIso:
    """Weight-sorted atom matching, water-filled slots, label-matched symbolic components."""
    order1, order2 = canonical_atom_order(S1), canonical_atom_order(S2)
    images = [frozenset() for _ in range(S1.n_atoms)]
    for i, j in zip(order1, order2):
        images[i] = frozenset({j})
    return MeasurePreservingIso(S1, S2, tuple(images), match_slots(S1, S2), symbolic_matches(S1, S2))


# ==================== DECISIONS ====================

def _extensions(S1: MeasureAlgebra, S2: MeasureAlgebra) -> Tuple[str, ...]:
    used = []
    if S1.atoms or S2.atoms:
        used.append(EXTENSION_ATOMIC_MATCHING)
    if any(s.atoms and s.components for s in (S1, S2)):
        used.append(EXTENSION_MIXED_SPACES)
    return tuple(used)


def decide_isometric(S1: MeasureAlgebra, S2: MeasureAlgebra,
                     tol: float = STRUCTURAL_RTOL) -> Decision:
    S1.require_nonempty()
    S2.require_nonempty()
    extensions = _extensions(S1, S2)
    mu_total, nu_total = total_measure(S1), total_measure(S2)
    if not close(mu_total, nu_total, tol):
        logging.info(f"decide_isometric: totals {mu_total!r} vs {nu_total!r} differ")
        refutation = TotalMeasureMismatch(total_measure_certificate(S1, S2, tol))
        return Decision(False, refutation=refutation, extensions_used=extensions)
    p1, p2 = passport(S1), passport(S2)
    atom_diff = p1.atom_diff(p2, tol)
    if atom_diff:
        logging.info(f"decide_isometric: atom multisets differ at {len(atom_diff)} positions")
        return Decision(False, refutation=AtomMultisetMismatch(tuple(atom_diff)),
                        extensions_used=extensions)
    row_diff = p1.row_diff(p2, tol)
    if row_diff:
        logging.info(f"decide_isometric: passports differ in {len(row_diff)} rows")
        return Decision(False, refutation=PassportMismatch(tuple(row_diff)),
                        extensions_used=extensions)
    logging.info(f"decide_isometric: isometric ({S1.describe()} ~ {S2.describe()})")
    return Decision(True, witness=witness_iso(S1, S2), extensions_used=extensions)


def brute_force_decide(S1: MeasureAlgebra, S2: MeasureAlgebra,
                       tol: float = STRUCTURAL_RTOL) -> bool:
    """Exhaustive search for a weight-preserving atom bijection."""
    if not (S1.is_atomic() and S2.is_atomic()):
        raise StructureMismatch("brute force only handles purely atomic spaces")
    n = max(S1.n_atoms, S2.n_atoms)
    if n > BRUTE_FORCE_MAX_ATOMS:
        raise TooLarge(f"{n} atoms exceeds the brute-force limit of {BRUTE_FORCE_MAX_ATOMS}")
    if S1.n_atoms != S2.n_atoms:
        return False
    w1, w2 = S1.atom_weights, S2.atom_weights
    return any(all(close(w1[i], w2[j], tol) for i, j in enumerate(perm))
               for perm in itertools.permutations(range(n)))
