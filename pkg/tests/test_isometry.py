"""Tests for isometry construction, verification, decomposition and algebra."""

import math

import numpy as np
import pytest

from src.core.errors import (
    DegenerateColumn,
    DisjointnessViolation,
    FormulaViolation,
    MalformedEvent,
    MalformedMap,
    MeasureMismatch,
    NotMeasurePreserving,
    NotSurjective,
    SpaceMismatch,
    StructureMismatch,
)
from src.services import isometry
from src.services.band_maps import (
    BandMap,
    InducedHomomorphism,
    MeasurePreservingIso,
    Transfer,
    identity,
)
from src.services.isometry import LinearMapTable, LogIsometry
from src.spaces import logspace as ls
from src.spaces.measure_algebra import Event, MeasureAlgebra
from src.utils.sampling import mixing_matrix, random_function, random_iso, random_signs, random_space


def _swap(space):
    return MeasurePreservingIso.from_component_map(space, space, [1, 0])


class TestLinearMapTable:
    def test_shape_and_apply(self, two_halves):
        table = LinearMapTable(two_halves, two_halves, ((0.0, -1.0), (1.0, 0.0)))
        f = ls.from_pieces(two_halves, [2.0, 3.0], [])
        assert table.apply(f).atom_values == (-3.0, 2.0)
        assert table.array.shape == (2, 2)

    def test_rejects_wrong_shape_and_values(self, two_halves):
        with pytest.raises(MalformedMap):
            LinearMapTable(two_halves, two_halves, ((1.0, 0.0),))
        with pytest.raises(MalformedMap):
            LinearMapTable(two_halves, two_halves, ((math.nan, 0.0), (0.0, 1.0)))

    def test_only_atomic_spaces(self, unit_interval, two_halves):
        with pytest.raises(StructureMismatch):
            LinearMapTable(unit_interval, two_halves, ((1.0,), (1.0,)))


class TestBuild:
    def test_signed_swap(self, two_halves):
        U = isometry.build_from_measure_preserving(_swap(two_halves), [1.0, -1.0])
        f = ls.from_pieces(two_halves, [2.0, 3.0], [])
        assert isometry.apply(U, f).atom_values == (-3.0, 2.0)
        assert isometry.signs_of(U) == (1.0, -1.0)
        assert isometry.formula_residual(U) == pytest.approx(0.0, abs=1e-12)

    def test_not_measure_preserving_is_refused(self):
        iso = MeasurePreservingIso.from_component_map(
            MeasureAlgebra.of([0.5, 0.5]), MeasureAlgebra.of([0.25, 0.75]), [0, 1])
        with pytest.raises(NotMeasurePreserving):
            isometry.build_from_measure_preserving(iso)

    def test_signs_must_be_unit(self, two_halves):
        with pytest.raises(MalformedMap):
            isometry.build_from_measure_preserving(_swap(two_halves), [1.0, 0.5])
        with pytest.raises(MalformedMap):
            isometry.build_from_measure_preserving(_swap(two_halves), [1.0])

    def test_segment_signs(self, unit_interval):
        iso = MeasurePreservingIso.from_component_map(
            unit_interval, unit_interval, [], [0], [[(0.0, 0.5, 0.5), (0.5, 0.0, 0.5)]])
        U = isometry.build_from_measure_preserving(iso, segment_signs=[-1.0, 1.0])
        # the first segment lands on [1/2, 1)
        assert U.multiplier.step_parts[0].values == (1.0, -1.0)
        assert isometry.verify_isometry(U, trials=20).passed

    def test_apply_checks_the_space(self, two_halves, unit_interval):
        U = isometry.build_from_measure_preserving(_swap(two_halves))
        with pytest.raises(SpaceMismatch):
            isometry.apply(U, ls.zero(unit_interval))


class TestVerify:
    def test_random_isometries_preserve_the_norm(self, rng):
        for _ in range(20):
            space = random_space(rng, unrealized=True)
            iso = random_iso(rng, space)
            U = isometry.build_from_measure_preserving(iso, random_signs(rng, space.n_atoms))
            report = isometry.verify_isometry(U, trials=25, seed=int(rng.integers(1000)))
            assert report.passed
            assert report.max_deviation < 1e-9

    def test_a_scaled_map_fails_with_a_property_tag(self, two_halves):
        phi = InducedHomomorphism.of(_swap(two_halves))
        scaled = LogIsometry(phi, ls.constant(two_halves, 2.0), isometry.range_density(phi))
        report = isometry.verify_isometry(scaled, trials=10)
        assert not report.passed
        assert report.to_dict()["violated_property"] == "norm-preservation"

    def test_is_deterministic_for_a_seed(self, rng):
        space = random_space(rng)
        U = isometry.build_from_measure_preserving(random_iso(rng, space))
        first = isometry.verify_isometry(U, trials=10, seed=5)
        assert isometry.verify_isometry(U, trials=10, seed=5) == first


class TestDecompose:
    def test_signed_permutation(self, two_halves):
        table = LinearMapTable(two_halves, two_halves, ((0.0, -1.0), (1.0, 0.0)))
        U = isometry.decompose(table)
        assert U.multiplier.atom_values == (-1.0, 1.0)
        assert U.phi.atom_map == (1, 0)

    def test_averaging_matrix_is_not_disjointness_preserving(self, two_halves):
        table = LinearMapTable(two_halves, two_halves, ((0.5, 0.5), (0.5, 0.5)))
        with pytest.raises(DisjointnessViolation) as info:
            isometry.decompose(table)
        assert info.value.violated_property == "disjointness-preservation"

    def test_identity_between_unequal_weights_is_a_measure_mismatch(self, two_halves):
        target = MeasureAlgebra.of([0.25, 0.75])
        with pytest.raises(MeasureMismatch):
            isometry.decompose(LinearMapTable(two_halves, target, ((1.0, 0.0), (0.0, 1.0))))

    def test_zero_column(self, two_halves):
        with pytest.raises(DegenerateColumn):
            isometry.decompose(LinearMapTable(two_halves, two_halves, ((1.0, 0.0), (0.0, 0.0))))

    def test_wrong_multiplier_is_a_formula_violation(self, two_halves):
        with pytest.raises(FormulaViolation):
            isometry.decompose(LinearMapTable(two_halves, two_halves, ((2.0, 0.0), (0.0, 1.0))))

    def test_atom_split_over_a_band(self):
        source = MeasureAlgebra.of([1.0])
        target = MeasureAlgebra.of([0.25, 0.75])
        U = isometry.decompose(LinearMapTable(source, target, ((1.0,), (-1.0,))))
        assert U.phi.atom_images == (frozenset({0, 1}),)
        assert isometry.verify_isometry(U, trials=10).passed

    def test_round_trip_through_the_matrix(self, rng):
        for n in range(1, 7):
            space = MeasureAlgebra.of(rng.uniform(0.1, 1.0, n).tolist())
            iso = random_iso(rng, space)
            signs = random_signs(rng, n)
            U = isometry.build_from_measure_preserving(iso, signs)
            V = isometry.decompose(isometry.matrix_of(U))
            assert V.phi.atom_map == iso.atom_map
            assert isometry.signs_of(V) == signs

    def test_mixing_matrices_are_refused(self, rng):
        for n in range(2, 7):
            space = MeasureAlgebra.of([1.0] * n)
            table = LinearMapTable(space, space, tuple(map(tuple, mixing_matrix(rng, n))))
            with pytest.raises(DisjointnessViolation):
                isometry.decompose(table)


class TestAlgebra:
    def test_compose(self, rng):
        space = random_space(rng)
        U1 = isometry.build_from_measure_preserving(random_iso(rng, space), random_signs(rng, space.n_atoms))
        U2 = isometry.build_from_measure_preserving(random_iso(rng, U1.target))
        W = isometry.compose(U2, U1)
        f = random_function(rng, space)
        assert ls.distance(isometry.apply(W, f), isometry.apply(U2, isometry.apply(U1, f))) < 1e-12

    def test_compose_needs_chained_spaces(self, two_halves, unit_interval):
        U = isometry.build_from_measure_preserving(_swap(two_halves))
        V = isometry.build_from_measure_preserving(
            MeasurePreservingIso.from_component_map(unit_interval, unit_interval, [], [0]))
        with pytest.raises(SpaceMismatch):
            isometry.compose(V, U)

    def test_inverse_round_trip(self, rng):
        space = random_space(rng)
        U = isometry.build_from_measure_preserving(random_iso(rng, space), random_signs(rng, space.n_atoms))
        f = random_function(rng, space)
        back = isometry.inverse(U)
        assert ls.distance(isometry.apply(back, isometry.apply(U, f)), f) < 1e-12

    def test_inverse_needs_a_surjection(self):
        source = MeasureAlgebra.of([1.0])
        target = MeasureAlgebra.of([1.0, 1.0])
        U = isometry.decompose(LinearMapTable(source, target, ((1.0,), (0.0,))))
        with pytest.raises(NotSurjective):
            isometry.inverse(U)

    def test_restrict_to_an_event(self, mixed_space):
        iso = MeasurePreservingIso.from_component_map(
            mixed_space, mixed_space, [0, 1], [0], [[(0.0, 0.5, 0.5), (0.5, 0.0, 0.5)]])
        U = isometry.build_from_measure_preserving(iso, [-1.0, 1.0])
        e = Event.build([0], {0: [(0.0, 0.5)]})
        R = isometry.restrict(U, e)
        assert R.source.atom_weights == (0.25,)
        assert isometry.verify_isometry(R, trials=20).passed

    def test_restrict_to_the_zero_event_is_malformed(self, two_halves):
        U = isometry.build_from_measure_preserving(_swap(two_halves))
        with pytest.raises(MalformedEvent):
            isometry.restrict(U, Event())

    def test_onto_range_check(self, two_halves):
        iso = _swap(two_halves)
        assert isometry.onto_range_check(iso).onto
        partial = InducedHomomorphism(MeasureAlgebra.of([0.5]), two_halves, (frozenset({0}),))
        certificate = isometry.onto_range_check(partial)
        assert certificate.bounded and not certificate.surjective and not certificate.onto
        with pytest.raises(StructureMismatch):
            isometry.onto_range_check(iso, MeasureAlgebra.of([1.0]))

    def test_onto_range_with_reweighted_measures(self, unit_interval):
        phi = BandMap(unit_interval, unit_interval, (), (Transfer(0, 0.0, 1.0, 0, 0.0, 1.0),))
        heavier = MeasureAlgebra.of((), [("aleph_0", 3.0)])
        certificate = isometry.onto_range_check(phi, unit_interval, heavier)
        assert certificate.onto
        assert certificate.sup == pytest.approx(1.0 / 3.0)

    def test_onto_range_of_a_mass_doubling_bijection(self):
        light = MeasureAlgebra.of([0.5, 0.25], [("aleph_0", 1.0)])
        heavy = MeasureAlgebra.of([1.0, 0.5], [("aleph_0", 2.0)])
        certificate = isometry.onto_range_check(identity(light), heavy, light)
        assert certificate.onto
        assert certificate.sup == pytest.approx(2.0)
        assert certificate.inf == pytest.approx(2.0)


def test_matrix_of_needs_atomic_spaces(unit_interval):
    U = isometry.build_from_measure_preserving(
        MeasurePreservingIso.from_component_map(unit_interval, unit_interval, [], [0]))
    with pytest.raises(StructureMismatch):
        isometry.matrix_of(U)


def test_matrix_of_a_signed_swap(two_halves):
    U = isometry.build_from_measure_preserving(_swap(two_halves), [1.0, -1.0])
    np.testing.assert_allclose(isometry.matrix_of(U).array, [[0.0, -1.0], [1.0, 0.0]])
