"""Exact continuous piecewise-linear functions on R, periodic modulo Z.

Functions are stored by (breakpoint, value) pairs on [0, 1), with 0 always
present, so continuity is structural.  All arithmetic is over
``fractions.Fraction``; no floats enter any computation here.
"""
from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import DomainError, FormatError

Rat = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(x) -> Fraction:
    """Parse an exact rational from an int, Fraction, or "p/q" string.

    Decimal strings (anything containing '.') are rejected: a decimal on a
    boundary would silently contaminate exact computations.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        if "." in x or "e" in x.lower():
            raise FormatError(f"expected exact rational 'p/q', got {x!r}")
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"not a rational: {x!r}") from exc
    raise FormatError(f"cannot interpret {type(x).__name__} as exact rational")


def rat_str(q: Fraction) -> str:
    return str(q)


@dataclass(frozen=True, order=True)
class Interval:
    """A closed interval [lo, hi] with rational endpoints, lo <= hi."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def to_pair(self) -> list:
        return [rat_str(self.lo), rat_str(self.hi)]


class PeriodicPWL:
    """A continuous piecewise-linear function R -> R, periodic modulo Z.

    ``breakpoints`` is a strictly increasing tuple of rationals in [0, 1)
    starting with 0; ``values`` the corresponding function values.  The last
    piece wraps: on [breakpoints[-1], 1] the function runs linearly to
    ``values[0]`` at abscissa 1.
    """

    __slots__ = ("breakpoints", "values")

    def __init__(self, breakpoints, values):
        bps = tuple(breakpoints)
        vals = tuple(values)
        if len(bps) == 0 or len(bps) != len(vals):
            raise FormatError("breakpoints/values must be nonempty and equal length")
        if bps[0] != 0:
            raise FormatError("breakpoint 0 must be present (and first)")
        for i in range(1, len(bps)):
            if bps[i] <= bps[i - 1]:
                raise FormatError("breakpoints must be strictly increasing")
        if bps[-1] >= 1:
            raise FormatError("breakpoints must lie in [0, 1)")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, *a):  # immutable value type
        raise AttributeError("PeriodicPWL is immutable")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_points(cls, points: Iterable[tuple]) -> "PeriodicPWL":
        """Build from (x, value) pairs; x is normalized mod 1.

        Duplicate abscissae must carry equal values.  The result is put in
        canonical form (collinear interior breakpoints merged).
        """
        seen = {}
        for x, v in points:
            x = rat(x) % 1
            v = rat(v)
            if x in seen and seen[x] != v:
                raise DomainError(f"conflicting values at breakpoint {x}")
            seen[x] = v
        if 0 not in seen:
            raise FormatError("breakpoint 0 must be present")
        bps = sorted(seen)
        return cls(bps, [seen[t] for t in bps]).canonical()

    def canonical(self) -> "PeriodicPWL":
        """Merge adjacent pieces of equal slope; breakpoint 0 is always kept."""
        m = len(self.breakpoints)
        if m <= 2:
            keep = range(m)
        else:
            keep = [0] + [i for i in range(1, m)
                          if self.piece_slope(i - 1) != self.piece_slope(i)]
        bps = [self.breakpoints[i] for i in keep]
        vals = [self.values[i] for i in keep]
        if len(bps) == 2 and PeriodicPWL(bps, vals).piece_slope(0) == \
                PeriodicPWL(bps, vals).piece_slope(1):
            bps, vals = bps[:1], vals[:1]
        return PeriodicPWL(bps, vals)

    # -- evaluation -------------------------------------------------------

    def piece_slope(self, i: int) -> Fraction:
        """Slope on piece [t_i, t_{i+1}] (the last piece wraps to 1)."""
        bps, vals = self.breakpoints, self.values
        if i == len(bps) - 1:
            return (vals[0] - vals[-1]) / (1 - bps[-1])
        return (vals[i + 1] - vals[i]) / (bps[i + 1] - bps[i])

    def eval(self, x) -> Fraction:
        x = rat(x) % 1
        i = bisect_right(self.breakpoints, x) - 1
        t = self.breakpoints[i]
        if x == t:
            return self.values[i]
        return self.values[i] + self.piece_slope(i) * (x - t)

    __call__ = eval

    def delta(self, x, y) -> Fraction:
        """Subadditivity slack f(x) + f(y) - f(x+y)."""
        x, y = rat(x), rat(y)
        return self.eval(x) + self.eval(y) - self.eval(x + y)

    def slopes(self) -> frozenset:
        return frozenset(self.piece_slope(i) for i in range(len(self.breakpoints)))

    # -- algebra ----------------------------------------------------------

    def reflect(self) -> "PeriodicPWL":
        """The function x -> f(-x), again continuous periodic PWL."""
        return PeriodicPWL.from_points(
            ((-t) % 1, v) for t, v in zip(self.breakpoints, self.values))

    def refine_to(self, breakpoints) -> "PeriodicPWL":
        """Re-express over a superset of the breakpoints (not canonicalized)."""
        bps = sorted(set(self.breakpoints) | {rat(t) % 1 for t in breakpoints})
        return PeriodicPWL(bps, [self.eval(t) for t in bps])

    # -- equality / hashing ----------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, PeriodicPWL):
            return NotImplemented
        a, b = self.canonical(), other.canonical()
        return a.breakpoints == b.breakpoints and a.values == b.values

    def __hash__(self):
        c = self.canonical()
        return hash((c.breakpoints, c.values))

    def __repr__(self):
        pts = ", ".join(f"({t}, {v})" for t, v in zip(self.breakpoints, self.values))
        return f"PeriodicPWL[{pts}]"

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "breakpoints": [rat_str(t) for t in self.breakpoints],
            "values": [rat_str(v) for v in self.values],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "PeriodicPWL":
        if not isinstance(d, dict) or set(d) != {"breakpoints", "values"}:
            raise FormatError("expected object with 'breakpoints' and 'values'")
        bps = [rat(t) for t in d["breakpoints"]]
        vals = [rat(v) for v in d["values"]]
        for t in bps:
            if not (0 <= t < 1):
                raise FormatError(f"breakpoint {t} outside [0, 1)")
        # __init__ enforces monotonicity and the presence of 0
        return cls(bps, vals)

    @classmethod
    def from_json(cls, text: str) -> "PeriodicPWL":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(d)


# -- module-level operation names matching the library surface ------------

def evaluate(f: PeriodicPWL, x) -> Fraction:
    return f.eval(x)


def delta(f: PeriodicPWL, x, y) -> Fraction:
    return f.delta(x, y)


def slopes(f: PeriodicPWL) -> frozenset:
    return f.slopes()


def reflect(f: PeriodicPWL) -> PeriodicPWL:
    return f.reflect()


def common_refinement(f: PeriodicPWL, g: PeriodicPWL):
    """Re-express both functions over the union of their breakpoint sets."""
    union = sorted(set(f.breakpoints) | set(g.breakpoints))
    return f.refine_to(union), g.refine_to(union)


def linear_combine(c1, f: PeriodicPWL, c2, g: PeriodicPWL) -> PeriodicPWL:
    """c1*f + c2*g, exact, in canonical form."""
    c1, c2 = rat(c1), rat(c2)
    rf, rg = common_refinement(f, g)
    vals = [c1 * a + c2 * b for a, b in zip(rf.values, rg.values)]
    return PeriodicPWL(rf.breakpoints, vals).canonical()


def equal_on(f: PeriodicPWL, g: PeriodicPWL, I: Interval) -> bool:
    """True iff f and g agree identically on the interval I.

    Both functions are affine between consecutive breakpoints of the common
    refinement, so agreement at those points (plus the endpoints of I)
    decides agreement on all of I.
    """
    pts = {I.lo, I.hi}
    import math
    j0, j1 = math.floor(I.lo) - 1, math.floor(I.hi) + 1
    for t in set(f.breakpoints) | set(g.breakpoints):
        for j in range(j0, j1 + 1):
            s = t + j
            if I.lo < s < I.hi:
                pts.add(s)
    return all(f.eval(p) == g.eval(p) for p in pts)


def breakpoints_in(f: PeriodicPWL, lo: Fraction, hi: Fraction) -> list:
    """Breakpoint abscissae of the periodic extension of f inside [lo, hi]."""
    import math
    out = []
    for j in range(math.floor(lo), math.floor(hi) + 1):
        for t in f.breakpoints:
            s = t + j
            if lo <= s <= hi:
                out.append(s)
    return sorted(set(out))
