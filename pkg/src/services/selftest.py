"""
Invariant suites behind the `selftest` command.

Each suite draws its cases from a generator seeded by (seed, suite position),
so a run is reproducible suite by suite. A suite never raises: failures and
unexpected errors end up in its SuiteResult.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from src.core.config import DEFAULT_SEED, NORM_ATOL, POINTWISE_ATOL, SUITE_SIZES
from src.core.errors import DegenerateColumn, DisjointnessViolation, InputError
from src.services import classify, isometry
from src.services.isometry import LinearMapTable
from src.spaces import logspace as ls
from src.spaces.measure_algebra import (
    MeasureAlgebra,
    WeightLabel,
    event_complement,
    event_difference,
    event_join,
    measure,
    passport,
    radon_nikodym,
    rescale,
    total_measure,
    with_measures,
)
from src.utils import sampling


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    cases: int
    max_deviation: float
    failures: int = 0
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "cases": self.cases,
            "max_deviation": self.max_deviation,
            "failures": self.failures,
            "detail": self.detail,
        }


class Tally:
    """Collects deviations and failed checks for one suite."""

    def __init__(self, corrupt: bool = False):
        self.cases = 0
        self.max_deviation = 0.0
        self.failures: List[str] = []
        # hidden hook: spoils the first check so the suite must report a failure
        self._corrupt = corrupt

    def case(self) -> None:
        self.cases += 1

    def deviation(self, value: float, limit: float, what: str) -> None:
        if self._corrupt:
            value, self._corrupt = value + 1.0, False
        self.max_deviation = max(self.max_deviation, value)
        if not value <= limit:
            self.failures.append(f"{what}: {value:.3e} exceeds {limit:.0e}")

    def require(self, ok: bool, what: str) -> None:
        if self._corrupt:
            ok, self._corrupt = False, False
        if not ok:
            self.failures.append(what)


def _relative(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def _split_component(rng: np.random.Generator, space: MeasureAlgebra) -> MeasureAlgebra:
    """Split one component in two of the same label, then shuffle atoms and components."""
    components = list(space.components)
    if components:
        k = int(rng.integers(len(components)))
        share = float(rng.uniform(0.1, 0.9))
        comp = components.pop(k)
        components += [type(comp)(comp.weight_label, comp.measure * share),
                       type(comp)(comp.weight_label, comp.measure * (1.0 - share))]
    components = [components[k] for k in rng.permutation(len(components))]
    atoms = [space.atoms[k] for k in rng.permutation(space.n_atoms)]
    return MeasureAlgebra(tuple(atoms), tuple(components))


# ==================== MEASURE ALGEBRA ====================

def measure_additivity(rng: np.random.Generator, tally: Tally, size: int) -> None:
    for _ in range(size):
        tally.case()
        space = sampling.random_space(rng)
        disjoint, covered = [], sampling.random_event(rng, space)
        disjoint.append(covered)
        for _ in range(int(rng.integers(1, 4))):
            piece = event_difference(space, sampling.random_event(rng, space), covered)
            disjoint.append(piece)
            covered = event_join(space, covered, piece)
        parts = math.fsum(measure(space, e) for e in disjoint)
        tally.deviation(_relative(measure(space, covered), parts), 1e-12, "measure additivity")


def radon_nikodym_identity(rng: np.random.Generator, tally: Tally, size: int) -> None:
    for _ in range(size):
        tally.case()
        mu = sampling.random_space(rng, unrealized=True)
        nu = with_measures(mu, rng.uniform(*sampling.MASS_RANGE, mu.n_atoms),
                           rng.uniform(*sampling.MASS_RANGE, len(mu.components)))
        f = sampling.random_function(rng, mu)
        direct = ls.integrate(ls.rebase(f, nu))
        via_density = ls.integrate(f, radon_nikodym(nu, mu))
        scale = max(1.0, ls.integrate(ls.absolute(ls.rebase(f, nu))))
        tally.deviation(abs(direct - via_density) / scale, 1e-10, "radon-nikodym identity")


def passport_idempotence(rng: np.random.Generator, tally: Tally, size: int) -> None:
    for _ in range(size):
        tally.case()
        space = sampling.random_space(rng, unrealized=True)
        shuffled = _split_component(rng, space)
        p, q = passport(space), passport(shuffled)
        tally.require(p.rows_match(q) and p.atoms_match(q), "passport changed under split/shuffle")


# ==================== L_LOG ====================

def fnorm_axioms(rng: np.random.Generator, tally: Tally, size: int) -> None:
    for _ in range(size):
        tally.case()
        space = sampling.random_space(rng)
        f, g = sampling.random_function(rng, space), sampling.random_function(rng, space)
        nf, ng = ls.fnorm(f).value, ls.fnorm(g).value
        if measure(space, ls.support(f)) > 0:
            tally.require(nf > 0, "positivity: nonzero function has zero norm")
        alpha = float(rng.uniform(-1.0, 1.0))
        tally.deviation(max(0.0, ls.fnorm(alpha * f).value - nf), 1e-12, "scalar monotonicity")
        halvings = [ls.fnorm(2.0 ** -k * f).value for k in range(41)]
        tally.deviation(max(0.0, *(b - a for a, b in zip(halvings, halvings[1:]))), 1e-12,
                        "scalar continuity (monotone decrease)")
        tally.deviation(max(0.0, halvings[-1] - 2.0 ** -40 * ls.integrate(ls.absolute(f))), 1e-15,
                        "scalar continuity (limit)")
        tally.deviation(max(0.0, ls.fnorm(f + g).value - nf - ng), 1e-12, "subadditivity")
        apart = ls.restrict(g, event_complement(space, ls.support(f)))
        joined = ls.fnorm(f + apart).value
        gap = abs(joined - nf - ls.fnorm(apart).value) / max(1.0, joined)
        tally.deviation(gap, 1e-12, "disjoint additivity")
        tally.deviation(max(0.0, ls.fnorm(f * g).value - nf - ng), 1e-12, "product bound")
        h = ls.absolute(f)
        tails = [ls.fnorm(h - ls.truncate(h, 2.0 ** k)).value for k in range(12)]
        tally.deviation(max(0.0, *(b - a for a, b in zip(tails, tails[1:]))), 1e-12,
                        "monotone convergence (decrease)")
        tally.deviation(tails[-1], 1e-12, "monotone convergence (limit)")


def indicator_norm(rng: np.random.Generator, tally: Tally, size: int) -> None:
    for _ in range(size):
        tally.case()
        space = sampling.random_space(rng)
        e = sampling.random_event(rng, space)
        expected = measure(space, e) * math.log(2.0)
        tally.deviation(_relative(ls.fnorm(ls.indicator(space, e)).value, expected), 1e-12,
                        "indicator norm")


# ==================== ISOMETRIES ====================

def _random_isometry(rng: np.random.Generator, space: MeasureAlgebra, signed: bool = True):
    iso = sampling.random_iso(rng, space)
    if signed and rng.random() < 0.5:
        return isometry.build_from_measure_preserving(
            iso, sampling.random_signs(rng, space.n_atoms), sampling.random_signs(rng, len(iso.transfers)))
    return isometry.build_from_measure_preserving(iso)


def measure_preserving(rng: np.random.Generator, tally: Tally, size: int) -> None:
    functions = SUITE_SIZES["measure_preserving_functions"]
    for _ in range(size):
        tally.case()
        U = _random_isometry(rng, sampling.random_space(rng, unrealized=True))
        report = isometry.verify_isometry(U, trials=functions, seed=int(rng.integers(2 ** 31)))
        tally.deviation(report.max_deviation, NORM_ATOL, "norm preservation")
        tally.deviation(isometry.formula_residual(U), 1e-9, "multiplier/density identity")


def isometry_algebra(rng: np.random.Generator, tally: Tally, size: int) -> None:
    for _ in range(size):
        tally.case()
        space = sampling.random_space(rng)
        U = _random_isometry(rng, space)
        f, g = sampling.random_function(rng, space), sampling.random_function(rng, space)
        a, b = (float(x) for x in rng.uniform(-3.0, 3.0, 2))
        combined = isometry.apply(U, a * f + b * g)
        separate = a * isometry.apply(U, f) + b * isometry.apply(U, g)
        tally.deviation(ls.distance(combined, separate), POINTWISE_ATOL, "linearity")

        apart = ls.restrict(g, event_complement(space, ls.support(f)))
        product = isometry.apply(U, f) * isometry.apply(U, apart)
        tally.deviation(measure(U.target, ls.support(product)), POINTWISE_ATOL, "disjointness preservation")

        U2 = _random_isometry(rng, U.target)
        chained = isometry.compose(U2, U)
        report = isometry.verify_isometry(chained, trials=10, seed=int(rng.integers(2 ** 31)))
        tally.deviation(report.max_deviation, NORM_ATOL, "composition")

        e = sampling.random_event(rng, space)
        if not e.is_empty():
            restricted = isometry.restrict(U, e)
            report = isometry.verify_isometry(restricted, trials=10, seed=int(rng.integers(2 ** 31)))
            tally.deviation(report.max_deviation, NORM_ATOL, "restriction")
            tally.deviation(_relative(total_measure(restricted.source), measure(space, e)), 1e-12,
                            "relativized measure")

        back = isometry.inverse(U)
        tally.deviation(ls.distance(isometry.apply(back, isometry.apply(U, f)), f), POINTWISE_ATOL,
                        "inverse round trip")


def decomposition_round_trip(rng: np.random.Generator, tally: Tally, size: int) -> None:
    for _ in range(size):
        tally.case()
        space = sampling.random_atomic_space(rng, int(rng.integers(1, 7)))
        iso = sampling.random_iso(rng, space)
        signs = sampling.random_signs(rng, space.n_atoms)
        U = isometry.build_from_measure_preserving(iso, signs)
        V = isometry.decompose(isometry.matrix_of(U))
        tally.require(V.phi.atom_map == iso.atom_map, "atom map not recovered")
        tally.require(isometry.signs_of(V) == signs, "signs not recovered")
        tally.deviation(max(abs(r - 1.0) for r in V.lambda_density.atom_ratios), 1e-12, "density")
        tally.deviation(isometry.formula_residual(V), 1e-9, "multiplier/density identity")


def disjointness_negative_control(rng: np.random.Generator, tally: Tally, size: int) -> None:
    for _ in range(size):
        tally.case()
        space = sampling.random_atomic_space(rng, int(rng.integers(2, 7)))
        table = LinearMapTable(space, space, tuple(map(tuple, sampling.mixing_matrix(rng, space.n_atoms))))
        try:
            isometry.decompose(table)
            tally.require(False, "mixing matrix accepted as an isometry")
        except DegenerateColumn:
            tally.require(False, "mixing matrix reported as degenerate")
        except DisjointnessViolation:
            tally.require(True, "")


# ==================== CLASSIFICATION ====================

def separation_certificate(rng: np.random.Generator, tally: Tally, size: int) -> None:
    for _ in range(size):
        tally.case()
        mu = sampling.random_space(rng)
        t = float(rng.uniform(1.1, 10.0))
        nu = rescale(mu, t)
        mu_total, nu_total = total_measure(mu), total_measure(nu)
        threshold = classify.separating_lambda(mu_total, nu_total, nu_total * math.log(2.0))
        swapped = classify.separating_lambda(nu_total, mu_total, nu_total * math.log(2.0))
        tally.deviation(_relative(threshold.lambda_star, swapped.lambda_star), 1e-12, "swapped branch")
        lam = classify.default_lambda(threshold.lambda_star)
        cert = classify.verify_separation(mu, nu, classify.candidate_map(nu, mu), lam)
        expected = (t - 1.0) * mu_total * math.log1p(lam)
        tally.deviation(_relative(cert.lhs - cert.rhs, expected), 1e-10, "closed-form separation gap")
        decision = classify.decide_isometric(mu, nu)
        tally.require(not decision.isometric and decision.refutation.certificate.separated,
                      "total-measure refutation does not separate")


def _oracle_pair(rng: np.random.Generator):
    n = int(rng.integers(1, 8))
    left = sampling.random_atomic_space(rng, n)
    kind = int(rng.integers(4))
    weights = list(left.atom_weights)
    if kind == 3:
        return left, sampling.random_atomic_space(rng, int(rng.integers(1, 8)))
    weights = [weights[k] for k in rng.permutation(n)]
    if kind == 1:
        weights[0] *= 1.0 + 1e-12
    elif kind == 2:
        weights[0] *= 1.0 + 1e-6
    return left, MeasureAlgebra.of(weights)


def classification_oracle(rng: np.random.Generator, tally: Tally, size: int) -> None:
    for _ in range(size):
        tally.case()
        left, right = _oracle_pair(rng)
        decision = classify.decide_isometric(left, right)
        tally.require(decision.isometric == classify.brute_force_decide(left, right), "oracle disagreement")
        tally.require(decision.isometric == classify.decide_isometric(right, left).isometric, "asymmetry")
        if decision.isometric:
            U = isometry.build_from_measure_preserving(decision.witness)
            report = isometry.verify_isometry(U, trials=5, seed=int(rng.integers(2 ** 31)))
            tally.deviation(report.max_deviation, NORM_ATOL, "witness soundness")


def passport_criterion(rng: np.random.Generator, tally: Tally, size: int) -> None:
    tally.case()
    fixed = classify.decide_isometric(MeasureAlgebra.of((), [("aleph_0", 1.0), ("aleph_1", 1.0)]),
                                      MeasureAlgebra.of((), [("aleph_0", 2.0)]))
    tally.require(not fixed.isometric and isinstance(fixed.refutation, classify.PassportMismatch),
                  "label mismatch with equal totals not refuted by passport")
    for _ in range(size):
        tally.case()
        label = WeightLabel(int(rng.integers(0, 3)))
        measures = rng.uniform(*sampling.MASS_RANGE, int(rng.integers(1, 4)))
        left = MeasureAlgebra.of((), [(label, float(m)) for m in measures])
        factor = 1.0 if rng.random() < 0.5 else float(rng.uniform(0.5, 2.0))
        right = rescale(_split_component(rng, left), factor)
        decision = classify.decide_isometric(left, right)
        tally.require(decision.isometric == (factor == 1.0), "homogeneous pair misclassified")

        tally.case()
        space = sampling.random_space(rng, unrealized=True)
        variant = _split_component(rng, space)
        decision = classify.decide_isometric(space, variant)
        tally.require(decision.isometric, "passport invariance violated")
        if decision.isometric:
            U = isometry.build_from_measure_preserving(decision.witness)
            report = isometry.verify_isometry(U, trials=5, seed=int(rng.integers(2 ** 31)))
            tally.deviation(report.max_deviation, NORM_ATOL, "witness soundness")


SUITES: Dict[str, Callable[[np.random.Generator, Tally, int], None]] = {
    "measure_additivity": measure_additivity,
    "radon_nikodym": radon_nikodym_identity,
    "passport_idempotence": passport_idempotence,
    "fnorm_axioms": fnorm_axioms,
    "indicator_norm": indicator_norm,
    "measure_preserving": measure_preserving,
    "isometry_algebra": isometry_algebra,
    "decomposition_round_trip": decomposition_round_trip,
    "disjointness_negative_control": disjointness_negative_control,
    "separation_certificate": separation_certificate,
    "classification_oracle": classification_oracle,
    "passport_criterion": passport_criterion,
}


def run_suite(name: str, seed: int = DEFAULT_SEED, corrupt: bool = False,
              size: Optional[int] = None) -> SuiteResult:
    position = list(SUITES).index(name)
    rng = np.random.default_rng([seed, position])
    tally = Tally(corrupt)
    try:
        SUITES[name](rng, tally, size if size is not None else SUITE_SIZES[name])
    except Exception as e:
        logging.error(f"selftest {name}: {type(e).__name__}: {e}")
        tally.failures.append(f"{type(e).__name__}: {e}")
    passed = not tally.failures
    detail = "" if passed else f"{tally.failures[0]} ({len(tally.failures)} failed checks)"
    logging.info(f"selftest {name}: {'pass' if passed else 'FAIL'} over {tally.cases} cases")
    return SuiteResult(name, passed, tally.cases, tally.max_deviation, len(tally.failures), detail)


def run_suites(seed: int = DEFAULT_SEED, corrupt: Optional[str] = None,
               sizes: Optional[Dict[str, int]] = None) -> List[SuiteResult]:
    if corrupt is not None and corrupt not in SUITES:
        raise InputError(f"unknown suite {corrupt!r}; choose one of {', '.join(SUITES)}")
    sizes = sizes or {}
    return [run_suite(name, seed, corrupt == name, sizes.get(name)) for name in SUITES]


def to_frame(results: List[SuiteResult]) -> pd.DataFrame:
    frame = pd.DataFrame([r.to_dict() for r in results])
    return frame.set_index("name")
