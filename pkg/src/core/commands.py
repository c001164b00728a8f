"""
Command dispatch for the LogSpace toolkit.

A Command names one verb and its input files; run() executes the mapped
operation and returns (exit status, report dict). The Typer app is a thin
shell around this module.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

from src.core.config import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    EXIT_NEGATIVE,
    EXIT_OK,
    NORM_ATOL,
    STRUCTURAL_RTOL,
)
from src.core.errors import InputError, InvalidParameter, LogSpaceError
from src.services import classify, isometry, selftest
from src.spaces import logspace
from src.spaces.measure_algebra import passport, total_measure
from src.storage.operations import DocumentStorage, function_to_doc, isometry_to_dict

# verb -> (minimum, maximum) number of input files
VERBS: Dict[str, Tuple[int, int]] = {
    "norm": (1, 1),
    "dist": (2, 2),
    "passport": (1, 1),
    "decide": (2, 2),
    "build-iso": (1, 1),
    "apply": (2, 2),
    "verify": (1, 1),
    "decompose": (1, 1),
    "separate": (2, 3),
    "selftest": (0, 0),
}


@dataclass(frozen=True)
class Command:
    verb: str
    inputs: Tuple[str, ...] = ()
    tolerance: Optional[float] = None
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    out: Optional[str] = None
    lam: Optional[float] = None
    corrupt: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))
        if self.verb not in VERBS:
            raise InputError(f"unknown verb {self.verb!r}; choose one of {', '.join(VERBS)}")
        low, high = VERBS[self.verb]
        if not low <= len(self.inputs) <= high:
            expected = str(low) if low == high else f"{low} to {high}"
            raise InputError(f"{self.verb} takes {expected} input files, got {len(self.inputs)}")
        if self.tolerance is not None and not (math.isfinite(self.tolerance) and self.tolerance > 0):
            raise InputError(f"tolerance must be a positive number, got {self.tolerance!r}")
        if self.trials < 1:
            raise InputError(f"trials must be at least 1, got {self.trials}")
        if self.lam is not None and not (math.isfinite(self.lam) and self.lam > 0):
            raise InvalidParameter(f"lambda must be a positive number, got {self.lam!r}")

    @property
    def tol(self) -> float:
        return self.tolerance if self.tolerance is not None else STRUCTURAL_RTOL


Report = Tuple[int, dict]


def _norm(command: Command, storage: DocumentStorage) -> Report:
    f = storage.load_function(command.inputs[0])
    return EXIT_OK, {"success": True, "fnorm": logspace.fnorm(f).value}


def _dist(command: Command, storage: DocumentStorage) -> Report:
    f, g = (storage.load_function(path) for path in command.inputs)
    return EXIT_OK, {"success": True, "distance": logspace.distance(f, g)}


def _passport(command: Command, storage: DocumentStorage) -> Report:
    space = storage.load_space(command.inputs[0])
    return EXIT_OK, {"success": True, "total_measure": total_measure(space),
                     "passport": passport(space).to_dict()}


def _decide(command: Command, storage: DocumentStorage) -> Report:
    left, right = (storage.load_space(path) for path in command.inputs)
    decision = classify.decide_isometric(left, right, command.tol)
    status = EXIT_OK if decision.isometric else EXIT_NEGATIVE
    return status, {"success": True, **decision.to_dict()}


def _build(command: Command, storage: DocumentStorage) -> isometry.LogIsometry:
    loaded = storage.load_isometry(command.inputs[0])
    return isometry.build_from_measure_preserving(loaded.iso, loaded.signs, loaded.segment_signs,
                                                  command.tol)


def _build_iso(command: Command, storage: DocumentStorage) -> Report:
    return EXIT_OK, {"success": True, "isometry": isometry_to_dict(_build(command, storage))}


def _apply(command: Command, storage: DocumentStorage) -> Report:
    U = _build(command, storage)
    f = storage.load_function(command.inputs[1])
    return EXIT_OK, {"success": True, "result": function_to_doc(isometry.apply(U, f))}


def _verify(command: Command, storage: DocumentStorage) -> Report:
    U = _build(command, storage)
    tol = command.tolerance if command.tolerance is not None else NORM_ATOL
    report = isometry.verify_isometry(U, command.trials, command.seed, tol)
    status = EXIT_OK if report.passed else EXIT_NEGATIVE
    return status, {"success": True, **report.to_dict(),
                    "formula_residual": isometry.formula_residual(U)}


def _decompose(command: Command, storage: DocumentStorage) -> Report:
    table = storage.load_matrix(command.inputs[0])
    U = isometry.decompose(table, command.tol)
    return EXIT_OK, {"success": True, "isometry": isometry_to_dict(U),
                     "formula_residual": isometry.formula_residual(U)}


def _separate(command: Command, storage: DocumentStorage) -> Report:
    S_mu, S_nu = (storage.load_space(path) for path in command.inputs[:2])
    if len(command.inputs) == 3:
        candidate = storage.load_matrix(command.inputs[2])
    else:
        candidate = classify.candidate_map(S_nu, S_mu)
    lam = command.lam
    if lam is None:
        # an isometry out of the nu-space must have ||U(1)|| = nu(1) ln 2
        forced = total_measure(S_nu) * math.log(2.0)
        threshold = classify.separating_lambda(total_measure(S_mu), total_measure(S_nu),
                                               forced, command.tol)
        lam = classify.default_lambda(threshold.lambda_star)
    cert = classify.verify_separation(S_mu, S_nu, candidate, lam, command.tol)
    status = EXIT_NEGATIVE if cert.separated else EXIT_OK
    return status, {"success": True, **cert.to_dict()}


def _selftest(command: Command, storage: DocumentStorage) -> Report:
    results = selftest.run_suites(command.seed, command.corrupt)
    passed = all(r.passed for r in results)
    return (EXIT_OK if passed else EXIT_NEGATIVE), {
        "success": True,
        "passed": passed,
        "seed": command.seed,
        "suites": [r.to_dict() for r in results],
    }


HANDLERS: Dict[str, Callable[[Command, DocumentStorage], Report]] = {
    "norm": _norm,
    "dist": _dist,
    "passport": _passport,
    "decide": _decide,
    "build-iso": _build_iso,
    "apply": _apply,
    "verify": _verify,
    "decompose": _decompose,
    "separate": _separate,
    "selftest": _selftest,
}


def run(command: Command, storage: Optional[DocumentStorage] = None) -> Report:
    """Execute one command; every LogSpaceError becomes an error report and its exit status."""
    storage = storage or DocumentStorage()
    try:
        status, report = HANDLERS[command.verb](command, storage)
    except LogSpaceError as e:
        logging.error(f"{command.verb}: {e.name}: {e.message}")
        return e.exit_status, e.to_dict()
    logging.info(f"{command.verb}: finished with status {status}")
    return status, report
