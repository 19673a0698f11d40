"""Exact decision procedures for minimality and the structural claims about
the k-slope family.  Every verifier returns a Certificate; a fail always
carries an exact witness that reproduces the violation."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .constructions import interval_system, new_slope
from .errors import DomainError
from .pwl import PeriodicPWL, rat, rat_str


@dataclass(frozen=True)
class Certificate:
    verdict: str                      # "pass" | "fail"
    witness: Optional[dict] = None
    checked_count: int = 0
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "witness": self.witness,
                "checked": self.checked_count}


def _pair_witness(x, y, d) -> dict:
    return {"kind": "pair", "x": rat_str(x), "y": rat_str(y), "delta": rat_str(d)}


def _point_witness(x, **extra) -> dict:
    w = {"kind": "point", "x": rat_str(x)}
    w.update(extra)
    return w


def worker_count() -> int:
    """Worker cap from GROUPCUT_THREADS; defaults to available parallelism."""
    env = os.environ.get("GROUPCUT_THREADS")
    if env is not None:
        n = int(env)
        if n < 1:
            raise DomainError("GROUPCUT_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def subadditivity_vertex_pairs(f: PeriodicPWL) -> list:
    """The finite vertex set on which the subadditivity slack attains its
    minimum.

    The slack D(x,y) = f(x)+f(y)-f(x+y) is piecewise linear on the
    arrangement cut by the lines x in B+Z, y in B+Z, x+y in B+Z (B the
    breakpoint set), so its minimum over the period square is attained at an
    intersection of two such lines.  Those intersections project exactly to
    the pairs enumerated here.
    """
    B = f.breakpoints
    pairs = set()
    for u in B:
        for v in B:
            pairs.add((u, v))
        for w in B:
            pairs.add((u, (w - u) % 1))
            pairs.add(((w - u) % 1, u))
    return sorted(pairs)


def _scan_chunk(f, pairs, lo, hi):
    for idx in range(lo, hi):
        x, y = pairs[idx]
        d = f.delta(x, y)
        if d < 0:
            return idx, d
    return None


def check_subadditive(f: PeriodicPWL) -> Certificate:
    """Exact subadditivity decision via the vertex scan; witness is the
    lexicographically smallest violating pair."""
    pairs = subadditivity_vertex_pairs(f)
    n = len(pairs)
    workers = min(worker_count(), 8)
    if workers <= 1 or n < 256:
        hit = _scan_chunk(f, pairs, 0, n)
    else:
        step = -(-n // workers)
        chunks = [(i, min(i + step, n)) for i in range(0, n, step)]
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(lambda c: _scan_chunk(f, pairs, *c), chunks))
        hits = [r for r in results if r is not None]
        hit = min(hits) if hits else None   # smallest index wins: deterministic
    if hit is None:
        return Certificate("pass", checked_count=n)
    idx, d = hit
    x, y = pairs[idx]
    return Certificate("fail", witness=_pair_witness(x, y, d), checked_count=idx + 1)


def check_symmetry(f: PeriodicPWL, b) -> Certificate:
    """Decide f(x) + f(b-x) = 1 for all x.

    g(x) = f(x) + f(b-x) is piecewise linear with breakpoints in
    B union (b - B) mod 1, so g = 1 everywhere iff it holds at those points.
    """
    b = rat(b)
    pts = sorted({t for t in f.breakpoints} | {(b - t) % 1 for t in f.breakpoints})
    for x in pts:
        s = f.eval(x) + f.eval(b - x)
        if s != 1:
            return Certificate("fail", witness=_point_witness(x, sum=rat_str(s)),
                               checked_count=len(pts))
    return Certificate("pass", checked_count=len(pts))


def check_nonnegative(f: PeriodicPWL) -> Certificate:
    """Minimum of a continuous PWL function is attained at a breakpoint."""
    for t, v in zip(f.breakpoints, f.values):
        if v < 0:
            return Certificate("fail", witness=_point_witness(t, value=rat_str(v)),
                               checked_count=len(f.breakpoints))
    return Certificate("pass", checked_count=len(f.breakpoints))


def check_minimal(f: PeriodicPWL, b) -> Certificate:
    """Minimality test: zero at integers, nonnegative, subadditive, symmetric.

    Sub-checks run in that fixed order and the first failure is reported.
    """
    b = rat(b)
    checked = 1
    if f.eval(0) != 0:
        return Certificate("fail", checked_count=1, detail="f(0) != 0",
                           witness=_point_witness(Fraction(0), value=rat_str(f.eval(0))))
    for name, cert in (("nonnegativity", check_nonnegative(f)),
                       ("subadditivity", check_subadditive(f)),
                       ("symmetry", check_symmetry(f, b))):
        checked += cert.checked_count
        if not cert.passed:
            return Certificate("fail", witness=cert.witness, checked_count=checked,
                               detail=name)
    return Certificate("pass", checked_count=checked)


def check_zero_set(f: PeriodicPWL) -> Certificate:
    """Pass iff f(0) = 0 and f > 0 everywhere else on [0, 1).

    Positivity on a piece is decided by its endpoint values.
    """
    if f.eval(0) != 0:
        return Certificate("fail", witness=_point_witness(Fraction(0)))
    n = len(f.breakpoints)
    for i, (t, v) in enumerate(zip(f.breakpoints, f.values)):
        if i > 0 and v <= 0:
            return Certificate("fail", witness=_point_witness(t, value=rat_str(v)),
                               checked_count=n)
        nxt = f.values[(i + 1) % n]
        if v <= 0 and nxt <= 0:
            # piece identically <= 0 on its interior
            hi = f.breakpoints[i + 1] if i + 1 < n else Fraction(1)
            mid = (t + hi) / 2
            return Certificate("fail", witness=_point_witness(mid, value=rat_str(f.eval(mid))),
                               checked_count=n)
    return Certificate("pass", checked_count=n)


def check_slope_census(f: PeriodicPWL, k: int, b) -> Certificate:
    """Exact comparison of the slope set against the level-k census, plus the
    placement facts: intermediate slopes on I3, the negative slope on I6."""
    b = rat(b)
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    neg = Fraction(-1) / (1 - b)
    expected = frozenset({neg} | {new_slope(i, b) for i in range(2, k + 1)})
    actual = f.canonical().slopes()
    if actual != expected:
        return Certificate("fail", witness={
            "kind": "slope-set",
            "expected": sorted(map(rat_str, expected)),
            "actual": sorted(map(rat_str, actual))})
    checked = len(expected)
    if k >= 3:
        sysk = interval_system(k, b)
        on_i3 = _slopes_on(f, sysk.i3.lo, sysk.i3.hi)
        want_i3 = frozenset(new_slope(i, b) for i in range(2, k))
        # the central band carries every intermediate new slope; the inherited
        # down-slope may appear there too, but the level-k new slope must not
        if not (want_i3 <= on_i3 <= want_i3 | {neg}):
            return Certificate("fail", witness={
                "kind": "slope-set", "where": "I3",
                "required": sorted(map(rat_str, want_i3)),
                "actual": sorted(map(rat_str, on_i3))}, checked_count=checked)
        on_i6 = _slopes_on(f, sysk.i6.lo, sysk.i6.hi)
        if on_i6 != frozenset({neg}):
            return Certificate("fail", witness={
                "kind": "slope-set", "where": "I6",
                "actual": sorted(map(rat_str, on_i6))}, checked_count=checked)
        checked += len(on_i3) + 1
    return Certificate("pass", checked_count=checked)


def _slopes_on(f: PeriodicPWL, lo: Fraction, hi: Fraction) -> frozenset:
    """Distinct slopes of f attained on the interior of [lo, hi] (subset of [0,1])."""
    g = f.canonical()
    out = set()
    n = len(g.breakpoints)
    for i in range(n):
        plo = g.breakpoints[i]
        phi = g.breakpoints[i + 1] if i + 1 < n else Fraction(1)
        if max(plo, lo) < min(phi, hi):
            out.add(g.piece_slope(i))
    return frozenset(out)


def brute_force_subadditive(f: PeriodicPWL, denominator_cap: int) -> Certificate:
    """Independent grid oracle: checks the slack on the uniform grid with the
    given denominator.  A pass is necessary but not sufficient for
    subadditivity; scanning is lexicographic with early exit, so a fail
    reports the lexicographically smallest violating grid pair.
    """
    q = denominator_cap
    if q < 2:
        raise DomainError(f"denominator_cap must be >= 2, got {q}")
    vals = [f.eval(Fraction(p, q)) for p in range(q)]
    scale = math.lcm(*(v.denominator for v in vals))
    a = [int(v * scale) for v in vals]
    checked = 0
    for i in range(q):
        ai = a[i]
        row = a[i:] + a[:i]      # row[j] = a[(i+j) % q]
        for j in range(q):
            checked += 1
            if ai + a[j] < row[j]:
                x, y = Fraction(i, q), Fraction(j, q)
                return Certificate("fail", witness=_pair_witness(x, y, f.delta(x, y)),
                                   checked_count=checked)
    return Certificate("pass", checked_count=checked)
