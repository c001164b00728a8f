"""
Half-open interval unions and step functions on the unit interval [0, 1).

Every realized component of a measure algebra is modelled as [0, 1) carrying a
constant density, so events on it are finite unions of half-open intervals and
functions on it are step functions over a finite partition.
"""

import bisect
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Sequence, Tuple

from src.core.config import LENGTH_SUM_TOL, SUPPORT_ATOL
from src.core.errors import MalformedEvent, MalformedFunction

Pair = Tuple[float, float]


def _merge(pairs: Iterable[Pair]) -> Tuple[Pair, ...]:
    """Sort, drop empty pieces, merge overlapping or touching pieces."""
    merged: List[List[float]] = []
    for start, end in sorted(p for p in pairs if p[1] > p[0]):
        if merged and start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    return tuple((a, b) for a, b in merged)


@dataclass(frozen=True)
class IntervalSet:
    """A finite union of disjoint half-open subintervals [a, b) of [0, 1)."""

    pieces: Tuple[Pair, ...] = ()

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @classmethod
    def unit(cls) -> "IntervalSet":
        return cls(((0.0, 1.0),))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "IntervalSet":
        """Build from user-supplied pairs, rejecting overlaps and out-of-range endpoints."""
        checked = []
        for pair in pairs:
            if len(pair) != 2:
                raise MalformedEvent(f"interval {pair!r} must have exactly two endpoints")
            start, end = float(pair[0]), float(pair[1])
            if not (math.isfinite(start) and math.isfinite(end)):
                raise MalformedEvent(f"interval [{start}, {end}) has a non-finite endpoint")
            if start < 0.0 or end > 1.0 or start > end:
                raise MalformedEvent(f"interval [{start}, {end}) is not inside [0, 1)")
            if end > start:
                checked.append((start, end))
        checked.sort()
        for (_, end), (start, _) in zip(checked, checked[1:]):
            if start < end:
                raise MalformedEvent(f"intervals overlap at [{start}, {end})")
        return cls(_merge(checked))

    @property
    def length(self) -> float:
        return math.fsum(b - a for a, b in self.pieces)

    def is_empty(self) -> bool:
        return not self.pieces

    def contains(self, x: float) -> bool:
        i = bisect.bisect_right(self.pieces, (x, math.inf)) - 1
        return i >= 0 and self.pieces[i][0] <= x < self.pieces[i][1]

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(_merge(self.pieces + other.pieces))

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        while i < len(self.pieces) and j < len(other.pieces):
            a0, a1 = self.pieces[i]
            b0, b1 = other.pieces[j]
            lo, hi = max(a0, b0), min(a1, b1)
            if hi > lo:
                out.append((lo, hi))
            if a1 < b1:
                i += 1
            else:
                j += 1
        return IntervalSet(_merge(out))

    def complement(self) -> "IntervalSet":
        out = []
        cursor = 0.0
        for a, b in self.pieces:
            if a > cursor:
                out.append((cursor, a))
            cursor = b
        if cursor < 1.0:
            out.append((cursor, 1.0))
        return IntervalSet(tuple(out))

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersection(other.complement())

    def isdisjoint(self, other: "IntervalSet") -> bool:
        return self.intersection(other).is_empty()

    def endpoints(self) -> List[float]:
        return [x for piece in self.pieces for x in piece]

    def affine_image(self, src_start: float, src_length: float,
                     dst_start: float, dst_length: float) -> "IntervalSet":
        """Image of the part inside [src_start, src_start + src_length) under the
        increasing affine map onto [dst_start, dst_start + dst_length)."""
        window = IntervalSet(((src_start, src_start + src_length),))
        scale = dst_length / src_length
        out = []
        for a, b in self.intersection(window).pieces:
            lo = dst_start + (a - src_start) * scale
            hi = dst_start + (b - src_start) * scale
            out.append((max(0.0, lo), min(1.0, hi)))
        return IntervalSet(_merge(out))


@dataclass(frozen=True)
class StepFunction:
    """A real step function on [0, 1): value values[k] on [breaks[k], breaks[k+1])."""

    breaks: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        if len(self.breaks) != len(self.values) + 1 or not self.values:
            raise MalformedFunction("step function needs one more breakpoint than values")
        if self.breaks[0] != 0.0 or self.breaks[-1] != 1.0:
            raise MalformedFunction("step function breakpoints must start at 0 and end at 1")
        if any(b <= a for a, b in zip(self.breaks, self.breaks[1:])):
            raise MalformedFunction("step function breakpoints must strictly increase")
        if not all(math.isfinite(v) for v in self.values):
            raise MalformedFunction("step function values must be finite")

    @classmethod
    def constant(cls, value: float) -> "StepFunction":
        return cls((0.0, 1.0), (float(value),))

    @classmethod
    def from_lengths(cls, pieces: Iterable[Tuple[float, float]],
                     tol: float = LENGTH_SUM_TOL) -> "StepFunction":
        """Build from consecutive (length, value) pieces; lengths must sum to 1."""
        pieces = [(float(length), float(value)) for length, value in pieces]
        if not pieces:
            raise MalformedFunction("a component needs at least one piece")
        if any(length < 0 or not math.isfinite(length) for length, _ in pieces):
            raise MalformedFunction("piece lengths must be finite and non-negative")
        total = math.fsum(length for length, _ in pieces)
        if abs(total - 1.0) > tol:
            raise MalformedFunction(f"piece lengths sum to {total!r}, expected 1")
        breaks = [0.0]
        values = []
        cursor = 0.0
        for length, value in pieces:
            if length == 0.0:
                continue
            cursor = min(cursor + length, 1.0)
            breaks.append(cursor)
            values.append(value)
        breaks[-1] = 1.0
        # rounding drift may leave repeated breakpoints at the right end
        keep = [0]
        for k in range(1, len(breaks)):
            if breaks[k] > breaks[keep[-1]]:
                keep.append(k)
        breaks = [breaks[k] for k in keep]
        values = [values[k - 1] for k in keep[1:]]
        return cls(tuple(breaks), tuple(values))

    @classmethod
    def indicator(cls, intervals: IntervalSet, value: float = 1.0) -> "StepFunction":
        points = sorted({0.0, 1.0, *intervals.endpoints()})
        values = tuple(value if intervals.contains((a + b) / 2) else 0.0
                       for a, b in zip(points, points[1:]))
        return cls(tuple(points), values).simplified()

    @property
    def lengths(self) -> Tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.breaks, self.breaks[1:]))

    def pieces(self) -> List[Tuple[float, float, float]]:
        """(start, end, value) triples."""
        return [(a, b, v) for a, b, v in zip(self.breaks, self.breaks[1:], self.values)]

    def value_at(self, x: float) -> float:
        k = bisect.bisect_right(self.breaks, x) - 1
        return self.values[min(max(k, 0), len(self.values) - 1)]

    def refine(self, points: Iterable[float]) -> "StepFunction":
        merged = sorted({*self.breaks, *(p for p in points if 0.0 < p < 1.0)})
        values = tuple(self.value_at((a + b) / 2) for a, b in zip(merged, merged[1:]))
        return StepFunction(tuple(merged), values)

    def map(self, fn: Callable[[float], float]) -> "StepFunction":
        return StepFunction(self.breaks, tuple(fn(v) for v in self.values))

    def combine(self, other: "StepFunction", op: Callable[[float, float], float]) -> "StepFunction":
        """Pointwise op on the common refinement of both breakpoint lists."""
        merged = sorted({*self.breaks, *other.breaks})
        values = []
        for a, b in zip(merged, merged[1:]):
            mid = (a + b) / 2
            values.append(op(self.value_at(mid), other.value_at(mid)))
        return StepFunction(tuple(merged), tuple(values))

    def simplified(self) -> "StepFunction":
        """Merge neighbouring pieces that carry the same value."""
        breaks = [self.breaks[0]]
        values: List[float] = []
        for b, v in zip(self.breaks[1:], self.values):
            if values and values[-1] == v:
                breaks[-1] = b
            else:
                breaks.append(b)
                values.append(v)
        return StepFunction(tuple(breaks), tuple(values))

    def integral(self, fn: Callable[[float], float] = lambda v: v) -> float:
        """Exact integral of fn(self) against Lebesgue measure on [0, 1)."""
        return math.fsum(length * fn(v) for length, v in zip(self.lengths, self.values))

    def support(self, atol: float = SUPPORT_ATOL) -> IntervalSet:
        return IntervalSet(_merge((a, b) for a, b, v in self.pieces() if abs(v) > atol))

    def max_abs_difference(self, other: "StepFunction") -> float:
        diff = self.combine(other, lambda v, w: abs(v - w))
        return max(diff.values)
