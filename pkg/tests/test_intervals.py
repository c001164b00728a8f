"""Tests for interval unions and step functions on [0, 1)."""

import math

import pytest

from src.core.errors import MalformedEvent, MalformedFunction
from src.spaces.intervals import IntervalSet, StepFunction


class TestIntervalSet:
    def test_from_pairs_merges_touching_pieces(self):
        s = IntervalSet.from_pairs([(0.5, 0.75), (0.25, 0.5)])
        assert s.pieces == ((0.25, 0.75),)
        assert s.length == pytest.approx(0.5)

    def test_empty_pairs_are_dropped(self):
        assert IntervalSet.from_pairs([(0.3, 0.3)]).is_empty()

    @pytest.mark.parametrize("pairs", [
        [(0.2, 0.6), (0.5, 0.9)],
        [(-0.1, 0.2)],
        [(0.5, 1.5)],
        [(0.6, 0.2)],
        [(0.1, 0.2, 0.3)],
        [(0.0, math.inf)],
    ])
    def test_from_pairs_rejects_bad_input(self, pairs):
        with pytest.raises(MalformedEvent):
            IntervalSet.from_pairs(pairs)

    def test_contains_is_half_open(self):
        s = IntervalSet.from_pairs([(0.25, 0.5)])
        assert s.contains(0.25)
        assert not s.contains(0.5)
        assert not s.contains(0.1)

    def test_boolean_operations(self):
        a = IntervalSet.from_pairs([(0.0, 0.5)])
        b = IntervalSet.from_pairs([(0.25, 0.75)])
        assert a.union(b).pieces == ((0.0, 0.75),)
        assert a.intersection(b).pieces == ((0.25, 0.5),)
        assert a.difference(b).pieces == ((0.0, 0.25),)
        assert a.complement().pieces == ((0.5, 1.0),)
        assert not a.isdisjoint(b)
        assert a.isdisjoint(a.complement())

    def test_complement_of_empty_and_unit(self):
        assert IntervalSet.empty().complement() == IntervalSet.unit()
        assert IntervalSet.unit().complement().is_empty()

    def test_affine_image_scales_the_window(self):
        s = IntervalSet.from_pairs([(0.0, 0.5)])
        image = s.affine_image(0.25, 0.5, 0.0, 1.0)
        assert image.pieces == ((0.0, 0.5),)


class TestStepFunction:
    def test_from_lengths(self):
        f = StepFunction.from_lengths([(0.25, 1.0), (0.75, -2.0)])
        assert f.breaks == (0.0, 0.25, 1.0)
        assert f.values == (1.0, -2.0)
        assert f.integral() == pytest.approx(0.25 - 1.5)

    def test_from_lengths_skips_zero_length_pieces(self):
        f = StepFunction.from_lengths([(0.5, 1.0), (0.0, 7.0), (0.5, 2.0)])
        assert f.values == (1.0, 2.0)

    @pytest.mark.parametrize("pieces", [
        [],
        [(0.5, 1.0)],
        [(1.5, 1.0), (-0.5, 1.0)],
        [(1.0, math.nan)],
    ])
    def test_from_lengths_rejects_bad_pieces(self, pieces):
        with pytest.raises(MalformedFunction):
            StepFunction.from_lengths(pieces)

    def test_constructor_checks_breakpoints(self):
        with pytest.raises(MalformedFunction):
            StepFunction((0.0, 0.5), (1.0,))
        with pytest.raises(MalformedFunction):
            StepFunction((0.0, 0.5, 0.5, 1.0), (1.0, 2.0, 3.0))

    def test_indicator_and_support(self):
        s = IntervalSet.from_pairs([(0.2, 0.4), (0.6, 0.7)])
        f = StepFunction.indicator(s, 3.0)
        assert f.value_at(0.3) == 3.0
        assert f.value_at(0.5) == 0.0
        assert f.support() == s
        assert f.integral() == pytest.approx(0.9)

    def test_combine_uses_common_refinement(self):
        f = StepFunction.from_lengths([(0.5, 1.0), (0.5, 2.0)])
        g = StepFunction.from_lengths([(0.25, 10.0), (0.75, 20.0)])
        h = f.combine(g, lambda a, b: a + b)
        assert h.breaks == (0.0, 0.25, 0.5, 1.0)
        assert h.values == (11.0, 21.0, 22.0)

    def test_simplified_merges_equal_neighbours(self):
        f = StepFunction((0.0, 0.25, 0.5, 1.0), (1.0, 1.0, 2.0))
        assert f.simplified() == StepFunction((0.0, 0.5, 1.0), (1.0, 2.0))

    def test_integral_of_log(self):
        f = StepFunction.from_lengths([(0.5, 1.0), (0.5, 0.0)])
        assert f.integral(lambda v: math.log1p(abs(v))) == pytest.approx(0.5 * math.log(2.0))

    def test_max_abs_difference(self):
        f = StepFunction.from_lengths([(0.5, 1.0), (0.5, 2.0)])
        assert f.max_abs_difference(StepFunction.constant(1.0)) == pytest.approx(1.0)
