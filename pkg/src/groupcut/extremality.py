"""Equality structure of the subadditivity slack, mechanical interval-lemma
application, extremality certification within the piecewise-linear
perturbation class, and an exact replay of the numeric facts behind the
facet argument for the k-slope family.

The perturbation certificates are deliberately scoped: `certified_unique`
means the function is the unique solution of the finite linear system over
continuous PWL perturbations on the chosen refinement.  That is the
checkable shadow of the unrestricted facet property, never a substitute for
it, and every serialized result says so.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .constructions import interval_system, pi_k, new_slope
from .errors import DomainError
from .pwl import Interval, PeriodicPWL, breakpoints_in, rat, rat_str
from .verification import (Certificate, check_minimal, check_subadditive,
                           subadditivity_vertex_pairs)

PWL_CAVEAT = ("certified within the continuous piecewise-linear perturbation "
              "class on the chosen refinement; this checks the facet "
              "theorem's hypothesis for PWL perturbations only, not for "
              "arbitrary minimal perturbations")


# ---------------------------------------------------------------------------
# equality structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EqualityStructure:
    """Additive vertices and full-dimensional additive faces of the
    subadditivity complex of a function."""

    additive_vertices: tuple      # of (x, y) pairs, slack exactly 0
    additive_faces: tuple         # of (Interval, Interval): U x V inside the zero set

    def to_dict(self) -> dict:
        return {
            "additive_vertices": [[rat_str(x), rat_str(y)]
                                  for x, y in self.additive_vertices],
            "additive_faces": [[u.to_pair(), v.to_pair()]
                               for u, v in self.additive_faces],
        }


def box_vertex_points(f: PeriodicPWL, U: Interval, V: Interval) -> list:
    """All arrangement vertices of the slack's complex inside U x V, plus the
    box corners and edge crossings.  The slack is affine between them."""
    xs = sorted({U.lo, U.hi, *breakpoints_in(f, U.lo, U.hi)})
    ys = sorted({V.lo, V.hi, *breakpoints_in(f, V.lo, V.hi)})
    ws = sorted({U.lo + V.lo, U.hi + V.hi,
                 *breakpoints_in(f, U.lo + V.lo, U.hi + V.hi)})
    pts = {(x, y) for x in xs for y in ys}
    for x in xs:
        for w in ws:
            y = w - x
            if V.lo <= y <= V.hi:
                pts.add((x, y))
    for y in ys:
        for w in ws:
            x = w - y
            if U.lo <= x <= U.hi:
                pts.add((x, y))
    return sorted(pts)


def delta_zero_on_box(f: PeriodicPWL, U: Interval, V: Interval) -> bool:
    """True iff the subadditivity slack vanishes identically on U x V."""
    return all(f.delta(x, y) == 0 for x, y in box_vertex_points(f, U, V))


def _cell_vertices(a1, a2, b1, b2, wl, wu):
    """Vertices of the convex cell {box} intersect {wl <= x+y <= wu}."""
    pts = set()
    for x in (a1, a2):
        for y in (b1, b2):
            if wl <= x + y <= wu:
                pts.add((x, y))
    for w in (wl, wu):
        for x in (a1, a2):
            y = w - x
            if b1 <= y <= b2:
                pts.add((x, y))
        for y in (b1, b2):
            x = w - y
            if a1 <= x <= a2:
                pts.add((x, y))
    return pts


def _inscribed_box(a1, a2, b1, b2, wl, wu):
    """A nondegenerate axis box inside the (full-dimensional) diagonal cell.

    Centered on the midline x + y = (wl+wu)/2; the half-size is capped so the
    box stays inside the strip and the bounding box.
    """
    wm = (wl + wu) / 2
    xlo = max(a1, wm - b2)
    xhi = min(a2, wm - b1)
    cx = (xlo + xhi) / 2
    cy = wm - cx
    h = min(cx - a1, a2 - cx, cy - b1, b2 - cy, (wu - wl) / 4)
    if h <= 0:
        return None
    return Interval(cx - h, cx + h), Interval(cy - h, cy + h)


def equality_structure(f: PeriodicPWL) -> EqualityStructure:
    """Enumerate additive vertices and additive faces exactly.

    Faces: every full-dimensional cell of the slack's complex on which the
    slack vanishes identically contributes its inscribed axis box.  Cells are
    listed per orientation without deduplication; duplicates are harmless for
    downstream constraint generation.
    """
    if not check_subadditive(f).passed:
        raise DomainError("equality structure requires a subadditive function")
    vertices = tuple((x, y) for x, y in subadditivity_vertex_pairs(f)
                     if f.delta(x, y) == 0)
    P = list(f.breakpoints) + [Fraction(1)]
    faces = []
    seen = set()
    for i in range(len(P) - 1):
        a1, a2 = P[i], P[i + 1]
        for j in range(len(P) - 1):
            b1, b2 = P[j], P[j + 1]
            ws = sorted({a1 + b1, a2 + b2,
                         *breakpoints_in(f, a1 + b1, a2 + b2)})
            for wl, wu in zip(ws, ws[1:]):
                if all(f.delta(x, y) == 0
                       for x, y in _cell_vertices(a1, a2, b1, b2, wl, wu)):
                    box = _inscribed_box(a1, a2, b1, b2, wl, wu)
                    if box is not None and box not in seen:
                        seen.add(box)
                        faces.append(box)
    return EqualityStructure(additive_vertices=vertices,
                             additive_faces=tuple(faces))


# ---------------------------------------------------------------------------
# interval lemma
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffinityConstraint:
    """Affinity with one shared slope on U, V and U+V (the latter reduced
    modulo 1, possibly into two segments)."""

    u: Interval
    v: Interval
    sum_parts: tuple   # one or two Intervals inside [0, 1]


def _sum_mod_segments(U: Interval, V: Interval):
    lo, hi = U.lo + V.lo, U.hi + V.hi
    if hi <= 1:
        return (Interval(lo, hi),)
    if lo >= 1:
        return (Interval(lo - 1, hi - 1),)
    return (Interval(lo, Fraction(1)), Interval(Fraction(0), hi - 1))


def interval_lemma_apply(structure: EqualityStructure, U: Interval,
                         V: Interval) -> AffinityConstraint:
    """Emit the affinity constraints licensed by U x V lying in an additive
    face: one unknown slope shared by U, V and U+V."""
    if U.degenerate or V.degenerate:
        raise DomainError("interval lemma requires nondegenerate intervals")
    for fu, fv in structure.additive_faces:
        if fu.contains_interval(U) and fv.contains_interval(V):
            return AffinityConstraint(u=U, v=V, sum_parts=_sum_mod_segments(U, V))
    raise DomainError("U x V is not contained in any additive face")


# ---------------------------------------------------------------------------
# PWL-restricted facet test
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PerturbationTestResult:
    dimension: int
    basis_functions: tuple
    verdict: str              # certified_unique | not_unique | inconclusive
    note: str = PWL_CAVEAT

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "dimension": self.dimension,
                "basis": [g.to_dict() for g in self.basis_functions],
                "note": self.note}


class _ExactSolver:
    """Incremental reduced row echelon form over exact rationals."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots = {}       # col -> (row dict, rhs)

    def add(self, row: dict, rhs: Fraction):
        row = {c: v for c, v in row.items() if v != 0}
        for col in sorted(row):
            if col in self.pivots:
                prow, prhs = self.pivots[col]
                factor = row[col]
                for c, v in prow.items():
                    row[c] = row.get(c, Fraction(0)) - factor * v
                    if row[c] == 0:
                        del row[c]
                rhs -= factor * prhs
        if not row:
            if rhs != 0:
                raise DomainError("inconsistent constraint system")
            return
        lead = min(row)
        inv = 1 / row[lead]
        row = {c: v * inv for c, v in row.items()}
        rhs *= inv
        # keep existing pivot rows reduced against the new one
        for col, (prow, prhs) in list(self.pivots.items()):
            if lead in prow:
                factor = prow[lead]
                for c, v in row.items():
                    prow[c] = prow.get(c, Fraction(0)) - factor * v
                    if prow[c] == 0:
                        del prow[c]
                self.pivots[col] = (prow, prhs - factor * rhs)
        self.pivots[lead] = (row, rhs)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def nullspace(self):
        free = [c for c in range(self.ncols) if c not in self.pivots]
        basis = []
        for fc in free:
            vec = [Fraction(0)] * self.ncols
            vec[fc] = Fraction(1)
            for col, (prow, _) in self.pivots.items():
                vec[col] = -prow.get(fc, Fraction(0))
            basis.append(vec)
        return basis


def _interp(grid, index, x):
    """Coefficients expressing the PWL value at x from grid unknowns."""
    x = x % 1
    i = bisect_right(grid, x) - 1
    t0 = grid[i]
    if x == t0:
        return {index[t0]: Fraction(1)}
    if i + 1 < len(grid):
        t1, c1 = grid[i + 1], index[grid[i + 1]]
    else:
        t1, c1 = Fraction(1), index[grid[0]]    # wrap: value at 1 is the value at 0
    lam = (x - t0) / (t1 - t0)
    return {index[t0]: 1 - lam, c1: lam}


def _add_into(row, coeffs, sign=1):
    for c, v in coeffs.items():
        row[c] = row.get(c, Fraction(0)) + sign * v
        if row[c] == 0:
            del row[c]


def _piece_slope_coeffs(grid, index, i):
    t0 = grid[i]
    if i + 1 < len(grid):
        t1, c1 = grid[i + 1], index[grid[i + 1]]
    else:
        t1, c1 = Fraction(1), index[grid[0]]
    inv = 1 / (t1 - t0)
    return {index[t0]: -inv, c1: inv}


def _pieces_meeting(grid, I: Interval):
    """Indices of grid pieces whose interior meets the interior of I."""
    out = []
    for i in range(len(grid)):
        plo = grid[i]
        phi = grid[i + 1] if i + 1 < len(grid) else Fraction(1)
        if max(plo, I.lo) < min(phi, I.hi):
            out.append(i)
    return out


def restricted_facet_test(f: PeriodicPWL, b, refinement_denominator: int,
                          structure: Optional[EqualityStructure] = None
                          ) -> PerturbationTestResult:
    """Solve, exactly, for all continuous PWL perturbations on the refinement
    that satisfy every constraint forced by the equality structure of f.

    Constraints: theta(0)=0, theta(b)=1, the symmetry identity at every grid
    point, additivity at every additive vertex, and interval-lemma affinity
    over every additive face.  `certified_unique` iff f is the only solution.
    """
    b = rat(b)
    if not check_minimal(f, b).passed:
        raise DomainError("restricted facet test requires a minimal function")
    es = structure if structure is not None else equality_structure(f)

    pts = set(f.breakpoints) | {b % 1}
    d = refinement_denominator
    pts |= {Fraction(i, d) for i in range(d)}
    pts |= {(b - t) % 1 for t in pts}
    grid = sorted(pts)
    index = {t: i for i, t in enumerate(grid)}
    n = len(grid)

    rows = []

    def add_row(row, rhs):
        if row:
            rows.append((row, rhs))

    add_row({index[Fraction(0)]: Fraction(1)}, Fraction(0))
    add_row({index[b % 1]: Fraction(1)}, Fraction(1))
    for x in grid:
        row = {}
        _add_into(row, _interp(grid, index, x))
        _add_into(row, _interp(grid, index, (b - x) % 1))
        add_row(row, Fraction(1))
    for x, y in es.additive_vertices:
        row = {}
        _add_into(row, _interp(grid, index, x))
        _add_into(row, _interp(grid, index, y))
        _add_into(row, _interp(grid, index, (x + y) % 1), sign=-1)
        add_row(row, Fraction(0))
    for fu, fv in es.additive_faces:
        con = interval_lemma_apply(es, fu, fv)
        groups = [con.u, con.v, *[s for s in con.sum_parts if not s.degenerate]]
        piece_ids = []
        for g in groups:
            piece_ids.extend(_pieces_meeting(grid, g))
        piece_ids = sorted(set(piece_ids))
        ref = piece_ids[0]
        ref_coeffs = _piece_slope_coeffs(grid, index, ref)
        for pid in piece_ids[1:]:
            row = {}
            _add_into(row, _piece_slope_coeffs(grid, index, pid))
            _add_into(row, ref_coeffs, sign=-1)
            add_row(row, Fraction(0))

    # every constraint is a consequence of facts f itself satisfies
    fvec = [f.eval(t) for t in grid]
    for row, rhs in rows:
        if sum(v * fvec[c] for c, v in row.items()) != rhs:
            raise RuntimeError("constraint generation bug: f violates its own "
                               "equality structure")

    solver = _ExactSolver(n)
    seen = set()
    for row, rhs in rows:
        key = (frozenset(row.items()), rhs)
        if key in seen:
            continue
        seen.add(key)
        solver.add(dict(row), rhs)

    dim = n - solver.rank
    basis = tuple(PeriodicPWL(grid, vec) for vec in solver.nullspace())
    if not es.additive_faces:
        verdict = "inconclusive"
    elif dim == 0:
        verdict = "certified_unique"
    else:
        verdict = "not_unique"
    return PerturbationTestResult(dimension=dim, basis_functions=basis,
                                  verdict=verdict)


# ---------------------------------------------------------------------------
# exact replay of the facet-proof facts
# ---------------------------------------------------------------------------

def affine_slope_on(f: PeriodicPWL, I: Interval) -> Optional[Fraction]:
    """The single slope of f on I, or None if f is not affine there."""
    if I.degenerate:
        return None
    chord = (f.eval(I.hi) - f.eval(I.lo)) / (I.hi - I.lo)
    for t in breakpoints_in(f, I.lo, I.hi):
        if f.eval(t) != f.eval(I.lo) + chord * (t - I.lo):
            return None
    return chord


def replay_pi_k_facet_proof(k: int, b, f: Optional[PeriodicPWL] = None
                            ) -> Certificate:
    """Verify, exactly, every numeric fact the facet argument for the
    level-k function rests on.  `f` defaults to the genuine construction;
    passing a mutant exercises the failure paths."""
    b = rat(b)
    if k < 3:
        raise DomainError(f"k must be >= 3, got {k}")
    if not (0 < b <= Fraction(1, 2)):
        raise DomainError(f"b must lie in (0, 1/2], got {b}")
    if f is None:
        f = pi_k(k, b)
    eighth = Fraction(1, 8)
    checked = 0

    def fail(step, msg):
        return Certificate("fail", witness={"kind": "replay-step", "step": step,
                                            "reason": msg},
                           checked_count=checked)

    # (a) the I6 face: [(1+b)/2, 1] + [(1+b)/2, 1] covers I6 mod 1, additively
    half = Interval((1 + b) / 2, Fraction(1))
    lo, hi = half.lo + half.lo, half.hi + half.hi
    checked += 1
    if (lo - 1, hi - 1) != (b, Fraction(1)):
        return fail("a", "sum interval does not reduce to [b, 1] mod 1")
    if not delta_zero_on_box(f, half, half):
        return fail("a", "slack does not vanish on the I6 square")
    checked += 1

    # (b) the central face and the quarter-point values
    U = Interval(b / 4, 3 * b / 8)
    if not delta_zero_on_box(f, U, U):
        return fail("b", "slack does not vanish on the central square")
    checked += 1
    for x, v in ((b / 4, Fraction(1, 4)), (b / 2, Fraction(1, 2)),
                 (3 * b / 4, Fraction(3, 4))):
        checked += 1
        if f.eval(x) != v:
            return fail("b", f"value at {x} is {f.eval(x)}, expected {v}")

    # (c) per level j: U + V recovers I2 mod 1, additively, with one slope
    for j in range(3, k + 1):
        eps = b * eighth ** (j - 2)
        U = Interval(3 * eps / 2, 2 * eps)
        V = Interval(1 - eps / 2, Fraction(1))
        i2 = interval_system(j, b).i2
        checked += 1
        if (U.lo + V.lo - 1, U.hi + V.hi - 1) != (i2.lo, i2.hi):
            return fail("c", f"j={j}: U+V does not reduce to I2 mod 1")
        if not delta_zero_on_box(f, U, V):
            return fail("c", f"j={j}: slack does not vanish on U x V")
        checked += 1
        s1, s2, s3 = (affine_slope_on(f, U), affine_slope_on(f, V),
                      affine_slope_on(f, i2))
        checked += 1
        if not (s1 == s2 == s3 == Fraction(-1) / (1 - b)):
            return fail("c", f"j={j}: slopes disagree on U, V, I2")

    # (d) per level j: the doubling chain pins the inner stub of I1
    for j in range(3, k):
        dl = b * eighth ** (j - 1)
        eps = b * eighth ** (j - 2)
        istar = Interval(2 * dl, eps)
        U = Interval(2 * dl, 4 * dl)
        checked += 1
        if (U.lo + U.lo, U.hi + U.hi) != (4 * dl, eps):
            return fail("d", f"j={j}: U+U is not the upper half of I*")
        if not (U.hi == 4 * dl and istar == Interval(U.lo, eps)):
            return fail("d", f"j={j}: U and U+U do not tile I*")
        for m in range(j + 1, k + 1):
            i3 = interval_system(m, b).i3
            checked += 1
            if not i3.contains_interval(istar):
                return fail("d", f"j={j}: I* is not inside level-{m} I3")
        checked += 3
        if f.delta(2 * dl, 2 * dl) != 0 or f.delta(4 * dl, 4 * dl) != 0:
            return fail("d", f"j={j}: doubling additivities fail")
        if 4 * f.eval(2 * dl) != f.eval(eps):
            return fail("d", f"j={j}: the 4x doubling chain breaks")
        if not delta_zero_on_box(f, U, U):
            return fail("d", f"j={j}: slack does not vanish on U x U")
        checked += 1

    # (e) the outermost stub: U + U tiles I1 additively
    eps = b * eighth ** (k - 2)
    U = Interval(Fraction(0), eps / 2)
    checked += 1
    if (U.lo, U.hi + U.hi) != (Fraction(0), eps):
        return fail("e", "U+U is not I1")
    if not delta_zero_on_box(f, U, U):
        return fail("e", "slack does not vanish on the I1 square")
    checked += 1

    return Certificate("pass", checked_count=checked)


def two_slope_shortcut(f: PeriodicPWL, b) -> Certificate:
    """Facet certificate by the two-slope theorem: a continuous minimal
    valid function with exactly 2 slopes is a facet, no perturbation
    computation needed."""
    b = rat(b)
    cm = check_minimal(f, b)
    if not cm.passed:
        return Certificate("fail", witness=cm.witness, checked_count=cm.checked_count,
                           detail="not minimal")
    ns = len(f.canonical().slopes())
    if ns != 2:
        return Certificate("fail", witness={"kind": "slope-count", "count": ns},
                           checked_count=cm.checked_count + 1,
                           detail="slope count is not 2; the shortcut does not apply")
    return Certificate("pass", checked_count=cm.checked_count + 1)
