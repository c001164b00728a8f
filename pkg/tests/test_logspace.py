"""Tests for L_log functions, the F-norm and the F-metric."""

import math

import pytest

from src.core.errors import MalformedFunction, SpaceMismatch, StructureMismatch
from src.spaces import logspace as ls
from src.spaces.measure_algebra import Event, MeasureAlgebra, radon_nikodym, with_measures
from src.utils.sampling import random_function, random_space

LN2 = math.log(2.0)


class TestConstruction:
    def test_from_pieces(self, mixed_space):
        f = ls.from_pieces(mixed_space, [1.0, -1.0], [[(0.5, 2.0), (0.5, 0.0)]])
        assert f.atom_values == (1.0, -1.0)
        assert f.step_parts[0].values == (2.0, 0.0)

    def test_shape_is_checked(self, mixed_space):
        with pytest.raises(MalformedFunction):
            ls.from_pieces(mixed_space, [1.0], [[(1.0, 0.0)]])
        with pytest.raises(MalformedFunction):
            ls.from_pieces(mixed_space, [1.0, 2.0], [])
        with pytest.raises(MalformedFunction):
            ls.from_pieces(mixed_space, [1.0, math.inf], [[(1.0, 0.0)]])

    def test_operators(self, two_halves):
        f = ls.from_pieces(two_halves, [1.0, 2.0], [])
        g = ls.from_pieces(two_halves, [3.0, -1.0], [])
        assert (f + g).atom_values == (4.0, 1.0)
        assert (f - g).atom_values == (-2.0, 3.0)
        assert (f * g).atom_values == (3.0, -2.0)
        assert (2.0 * f).atom_values == (2.0, 4.0)
        assert (-f).atom_values == (-1.0, -2.0)

    def test_functions_on_different_spaces_do_not_mix(self, two_halves, unit_interval):
        with pytest.raises(SpaceMismatch):
            ls.zero(two_halves) + ls.zero(unit_interval)


class TestFNorm:
    def test_indicator_of_measure_point_four(self, unit_interval):
        e = Event.build([], {0: [(0.1, 0.5)]})
        assert ls.fnorm(ls.indicator(unit_interval, e)).value == pytest.approx(0.4 * LN2)

    def test_atoms_one_and_three(self, two_halves):
        f = ls.from_pieces(two_halves, [1.0, 3.0], [])
        assert ls.fnorm(f).value == pytest.approx(1.5 * LN2)

    def test_zero_has_zero_norm(self, mixed_space):
        assert ls.fnorm(ls.zero(mixed_space)).value == 0.0

    def test_constant_one_norm_ignores_symbolic_components(self, mixed_space):
        # the aleph_1 component carries no function values
        assert ls.fnorm(ls.constant(mixed_space, 1.0)).value == pytest.approx(1.75 * LN2)

    def test_norm_is_not_homogeneous(self, two_halves):
        f = ls.constant(two_halves, 1.0)
        assert ls.fnorm(2.0 * f).value == pytest.approx(math.log(3.0))
        assert ls.fnorm(2.0 * f).value < 2.0 * ls.fnorm(f).value

    def test_distance_is_a_metric(self, rng):
        for _ in range(50):
            space = random_space(rng)
            f, g, h = (random_function(rng, space) for _ in range(3))
            assert ls.distance(f, f) == 0.0
            assert ls.distance(f, g) == pytest.approx(ls.distance(g, f))
            assert ls.distance(f, h) <= ls.distance(f, g) + ls.distance(g, h) + 1e-12

    def test_subadditivity_on_random_functions(self, rng):
        for _ in range(100):
            space = random_space(rng)
            f, g = random_function(rng, space), random_function(rng, space)
            assert ls.fnorm(f + g).value <= ls.fnorm(f).value + ls.fnorm(g).value + 1e-12


class TestHelpers:
    def test_support_and_restrict(self, mixed_space):
        f = ls.from_pieces(mixed_space, [0.0, 2.0], [[(0.5, 1.0), (0.5, 0.0)]])
        s = ls.support(f)
        assert s == Event.build([1], {0: [(0.0, 0.5)]})
        e = Event.build([0, 1], {0: [(0.25, 1.0)]})
        r = ls.restrict(f, e)
        assert r.atom_values == (0.0, 2.0)
        assert ls.integrate(r) == pytest.approx(2.0 * 0.5 + 0.25)

    def test_truncate_and_absolute(self, two_halves):
        f = ls.from_pieces(two_halves, [-3.0, 5.0], [])
        assert ls.truncate(ls.absolute(f), 4.0).atom_values == (3.0, 4.0)

    def test_integrate_against_a_density(self, mixed_space):
        nu = with_measures(mixed_space, [0.5, 1.0], [2.0, 0.75])
        f = ls.from_pieces(mixed_space, [1.0, 1.0], [[(1.0, 1.0)]])
        direct = ls.integrate(ls.rebase(f, nu))
        assert direct == pytest.approx(3.5)
        assert ls.integrate(f, radon_nikodym(nu, mixed_space)) == pytest.approx(direct)

    def test_rebase_needs_the_same_shape(self, two_halves):
        with pytest.raises(StructureMismatch):
            ls.rebase(ls.zero(two_halves), MeasureAlgebra.of([1.0]))

    def test_max_abs_difference_and_equality(self, unit_interval):
        f = ls.from_pieces(unit_interval, [], [[(0.5, 1.0), (0.5, 2.0)]])
        g = ls.constant(unit_interval, 1.0)
        assert ls.max_abs_difference(f, g) == pytest.approx(1.0)
        assert ls.functions_equal(f, f)
        assert not ls.functions_equal(f, g)
