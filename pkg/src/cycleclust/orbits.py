"""Periodic-orbit solver, stability classification, orbit catalog,
parameter-region classifier, transition graph, and the list of critical
parameter values.

A symbolic code is a sequence of cell labels.  Composing the affine
pieces along the code gives one affine map; its fixed points are the
periodic orbits with that itinerary.  Depending on the rank of
(I - A_composed) the solution is a single point, a line segment of
periodic points, or a polygon of them; candidates are then validated
against the closures of the coded cells.  All of it is exact rational
arithmetic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional

from .linalg import (
    IDENTITY,
    Matrix,
    Vector,
    madd,
    mdet,
    mmul,
    msub,
    mtrace,
    mvec,
    polygon_from_halfplanes,
    solve_affine,
)
from .model import ModelError, Parameters, Scalar, WedgeViolation, frac, point3
from .pieces import (
    Ineq,
    PIECE_ORDER,
    apply_F,
    classify_xy,
    normalize_label,
    piece_map,
    region_contains_closure,
    region_piece,
    region_polygon,
    sample_region,
)

F = Fraction

SOURCE = "source"
SINK = "sink"
NEUTRAL = "neutral"
HYPERBOLIC_SADDLE = "hyperbolic-saddle"
NEUTRAL_UNSTABLE = "neutral-unstable"
NEUTRAL_STABLE_TRANSVERSE = "neutral-stable-transverse"

STABILITY_CLASSES = (
    SOURCE,
    SINK,
    NEUTRAL,
    HYPERBOLIC_SADDLE,
    NEUTRAL_UNSTABLE,
    NEUTRAL_STABLE_TRANSVERSE,
)


class NoOrbit(ModelError):
    """The code admits no periodic orbit at these parameters."""

    def __init__(self, code, step=None, point=None, constraint=None, reason=None):
        self.code = tuple(str(c) for c in code)
        self.step = step
        self.point = point
        self.constraint = constraint
        parts = [f"no orbit with code {'-'.join(self.code)}"]
        if reason:
            parts.append(reason)
        if step is not None:
            parts.append(f"iterate {step} = {point} leaves cell {self.code[step]}")
        if constraint is not None:
            parts.append(f"violated condition {constraint}")
        super().__init__("; ".join(parts))


class EmptyFamily(NoOrbit):
    """The singular system is consistent but no family member satisfies
    the cell constraints."""


class Indeterminate(ModelError):
    """Float-path classification fell inside the tolerance band."""


class OutsideStudiedWedge(ModelError):
    pass


class NoTriangle(ModelError):
    pass


class InclusionViolation(ModelError):
    def __init__(self, region: str, point: Vector, image: Vector, image_label: str):
        self.region = region
        self.point = point
        self.image = image
        self.image_label = image_label
        super().__init__(
            f"cell {region} point ({point[0]}, {point[1]}) maps to "
            f"({image[0]}, {image[1]}) in cell {image_label}, outside the allowed set"
        )


# exact comparison of |(tr + sign*sqrt(disc))/2| with 1, disc >= 0
def _cmp_root(tr: Scalar, disc: Scalar, sign: int, c: int) -> int:
    """Sign of ((tr + sign*sqrt(disc))/2 - c) for c in {-1, 1}, exact."""
    u = 2 * c - tr
    if sign > 0:
        if u < 0:
            return 1
        if disc > u * u:
            return 1
        if disc == u * u:
            return 0
        return -1
    # sign < 0: compare -sqrt(disc) with u
    if u < 0:
        if disc < u * u:
            return 1
        if disc == u * u:
            return 0
        return -1
    return 0 if (disc == 0 and u == 0) else -1


def _root_abs_vs_one(tr: Scalar, disc: Scalar, sign: int) -> int:
    """Sign of |root| - 1 for a real eigenvalue, exact rational logic."""
    above = _cmp_root(tr, disc, sign, 1)
    below = _cmp_root(tr, disc, sign, -1)
    if above > 0 or below < 0:
        return 1
    if above == 0 or below == 0:
        return 0
    return -1


def classify_stability(trace: Scalar, det: Scalar) -> str:
    """Stability class of a 2x2 linear part from its exact invariants.

    Complex pairs share the modulus sqrt(det); real roots are compared
    with the unit circle by exact rational case analysis, so the result
    is total and tolerance-free.
    """
    trace, det = frac(trace), frac(det)
    disc = trace * trace - 4 * det
    if disc < 0:
        if det > 1:
            return SOURCE
        if det < 1:
            return SINK
        return NEUTRAL
    marks = sorted(_root_abs_vs_one(trace, disc, sg) for sg in (1, -1))
    lo, hi = marks
    if lo > 0:
        return SOURCE
    if hi < 0:
        return SINK
    if lo == 0 and hi == 0:
        return NEUTRAL
    if lo < 0 and hi > 0:
        return HYPERBOLIC_SADDLE
    if hi > 0:
        return NEUTRAL_UNSTABLE
    return NEUTRAL_STABLE_TRANSVERSE


def classify_stability_from_moduli(m1: float, m2: float, tol: float = 1e-9) -> str:
    """Float-path classification; raises when a modulus is too close to
    1 to call without exact data."""
    lo, hi = sorted((m1, m2))
    for m in (lo, hi):
        if abs(m - 1) <= tol and m != 1:
            raise Indeterminate(f"modulus {m} within {tol} of 1")
    if lo > 1:
        return SOURCE
    if hi < 1:
        return SINK
    if lo == 1 and hi == 1:
        return NEUTRAL
    if lo < 1 and hi > 1:
        return HYPERBOLIC_SADDLE
    if hi > 1:
        return NEUTRAL_UNSTABLE
    return NEUTRAL_STABLE_TRANSVERSE


def eigenvalue_pair(trace: Scalar, det: Scalar) -> tuple[complex, complex]:
    """Float rendering of the eigenvalues of a 2x2 linear part."""
    tr, d = float(trace), float(det)
    disc = tr * tr - 4 * d
    if disc >= 0:
        root = math.sqrt(disc)
        return ((tr + root) / 2 + 0j, (tr - root) / 2 + 0j)
    root = math.sqrt(-disc)
    return (complex(tr / 2, root / 2), complex(tr / 2, -root / 2))


CYCLE = "cycle"
LINE_FAMILY = "line-family"
PLANE_FAMILY = "plane-family"


@dataclass(frozen=True)
class OrbitRecord:
    """One periodic orbit, or a connected family of them, of the step map.

    For kind "cycle", points holds the full cycle.  For "line-family",
    the periodic points at parameter t in t_range are base + t*direction
    (points holds the cycle through the range midpoint).  For
    "plane-family", vertices bounds the closure polygon of periodic
    points and points holds its centroid's cycle.
    """

    name: str
    code: tuple[str, ...]
    kind: str
    points: tuple[Vector, ...]
    trace: Scalar
    det: Scalar
    eigenvalues: tuple[complex, complex]
    stability: str
    existence: str = ""
    base: Optional[Vector] = None
    direction: Optional[Vector] = None
    t_range: Optional[tuple[Scalar, Scalar]] = None
    t_open: tuple[bool, bool] = (False, False)
    vertices: Optional[tuple[Vector, ...]] = None
    constraints: Optional[tuple[Ineq, ...]] = None
    existence_bounds: Optional[tuple[Scalar, Scalar]] = None
    notes: str = ""

    def cycle_at(self, t: Scalar, params: Parameters) -> tuple[Vector, ...]:
        """Cycle through the family member at parameter t (line families)."""
        if self.kind != LINE_FAMILY:
            raise ValueError("cycle_at applies to line families only")
        p = (self.base[0] + t * self.direction[0], self.base[1] + t * self.direction[1])
        return _iterate_code(p, self.code, params)

    def contains(self, x1: Scalar, x2: Scalar, strict: bool = True) -> bool:
        """Membership in a plane family's periodic region."""
        if self.kind != PLANE_FAMILY:
            raise ValueError("contains applies to plane families only")
        if strict:
            return all(q.a * x1 + q.b * x2 + q.c > 0 for q in self.constraints)
        return all(q.holds_closure(x1, x2) for q in self.constraints)


def _compose_code(code, params: Parameters) -> tuple[Matrix, Vector, list[tuple[Matrix, Vector]]]:
    """Composed affine map along the code, plus every prefix map."""
    M: Matrix = IDENTITY
    v: Vector = (F(0), F(0))
    prefixes = [(M, v)]
    for label in code:
        piece = region_piece(label, params)
        M = mmul(piece.A, M)
        v = madd(mvec(piece.A, v), piece.b)
        prefixes.append((M, v))
    return M, v, prefixes


def _iterate_code(p: Vector, code, params: Parameters) -> tuple[Vector, ...]:
    pts = [p]
    for label in code[:-1]:
        piece = region_piece(label, params)
        pts.append(piece.apply(pts[-1][0], pts[-1][1]))
    return tuple(pts)


def _closure_ineqs(label, params: Parameters) -> tuple[Ineq, ...]:
    """Closure conditions of a code symbol.  The union cell "3" is convex
    (a parallelogram), so its closure is the conjunction of the shared
    outer conditions."""
    lab = normalize_label(label)
    if lab == "3":
        r, s = params.r, params.s
        return (
            Ineq(F(1), F(0), F(0)),                 # x1 >= 0
            Ineq(F(-1), F(0), params.r - params.s), # x1 <= r-s
            Ineq(F(0), F(1), -(r - s)),             # x2 >= r-s
            Ineq(F(0), F(-1), r),                   # x2 <= r
            Ineq(F(1), F(-1), r - s),               # x2 <= x1 + r-s
            Ineq(F(-1), F(1), F(0)),                # x2 >= x1
        )
    return piece_map(params)[lab].ineqs


def _check_closure(point: Vector, label, params: Parameters) -> Optional[Ineq]:
    """First violated closure condition, or None if the point is inside."""
    for q in _closure_ineqs(label, params):
        if not q.holds_closure(point[0], point[1]):
            return q
    return None


def _ineq_str(q: Ineq) -> str:
    return f"{q.a}*x1 + {q.b}*x2 + {q.c} >= 0"


def solve_code(code, params: Parameters, name: str = "", existence: str = "", notes: str = "") -> OrbitRecord:
    """Find the periodic orbit(s) with the given itinerary.

    Raises NoOrbit when the composed system is inconsistent or its
    unique candidate leaves a coded cell, EmptyFamily when a singular
    system has solutions but none satisfies the cell constraints.
    """
    params.require_wedge()
    code = tuple(normalize_label(c) for c in code)
    A_tot, b_tot, prefixes = _compose_code(code, params)
    trace, det = mtrace(A_tot), mdet(A_tot)
    stability = classify_stability(trace, det)
    eig = eigenvalue_pair(trace, det)
    name = name or f"code-{'-'.join(code)}"

    sol = solve_affine(msub(IDENTITY, A_tot), b_tot)
    if sol is None:
        raise NoOrbit(code, reason="composed affine system has no solution")
    particular, kernel = sol

    if len(kernel) == 0:
        pts = _iterate_code(particular, code, params)
        for i, q in enumerate(pts):
            bad = _check_closure(q, code[i], params)
            if bad is not None:
                raise NoOrbit(code, step=i, point=q, constraint=_ineq_str(bad))
        return OrbitRecord(
            name=name, code=code, kind=CYCLE, points=pts,
            trace=trace, det=det, eigenvalues=eig, stability=stability,
            existence=existence, notes=notes,
        )

    if len(kernel) == 1:
        direction = kernel[0]
        # member(t) = particular + t*direction; push every closure
        # condition of step i through the prefix map
        t_lo, t_hi = None, None
        lo_open, hi_open = False, False
        for i, label in enumerate(code):
            M, v = prefixes[i]
            q0 = madd(mvec(M, particular), v)
            dq = mvec(M, direction)
            for q in _closure_ineqs(label, params):
                alpha = q.a * q0[0] + q.b * q0[1] + q.c
                beta = q.a * dq[0] + q.b * dq[1]
                if beta == 0:
                    if alpha < 0:
                        raise EmptyFamily(code, constraint=_ineq_str(q),
                                          reason=f"step {i} violates a condition for every member")
                    continue
                bound = -alpha / beta
                if beta > 0:
                    if t_lo is None or bound > t_lo:
                        t_lo, lo_open = bound, q.strict
                    elif bound == t_lo:
                        lo_open = lo_open or q.strict
                else:
                    if t_hi is None or bound < t_hi:
                        t_hi, hi_open = bound, q.strict
                    elif bound == t_hi:
                        hi_open = hi_open or q.strict
        if t_lo is None or t_hi is None or t_lo > t_hi:
            raise EmptyFamily(code, reason="cell constraints admit no member")
        if t_lo == t_hi:
            # closure semantics, matching the polygon case: the single
            # surviving member may sit on cell boundaries
            member = (particular[0] + t_lo * direction[0], particular[1] + t_lo * direction[1])
            pts = _iterate_code(member, code, params)
            return OrbitRecord(
                name=name, code=code, kind=CYCLE, points=pts,
                trace=trace, det=det, eigenvalues=eig, stability=stability,
                existence=existence,
                notes=(notes + " " if notes else "") + "family degenerates to one cycle",
            )
        mid = (t_lo + t_hi) / 2
        member = (particular[0] + mid * direction[0], particular[1] + mid * direction[1])
        return OrbitRecord(
            name=name, code=code, kind=LINE_FAMILY,
            points=_iterate_code(member, code, params),
            trace=trace, det=det, eigenvalues=eig, stability=stability,
            existence=existence, base=particular, direction=direction,
            t_range=(t_lo, t_hi), t_open=(lo_open, hi_open), notes=notes,
        )

    # kernel rank 2: A_tot is the identity; every point of the
    # constraint polygon is periodic
    constraints: list[Ineq] = []
    for i, label in enumerate(code):
        M, v = prefixes[i]
        for q in _closure_ineqs(label, params):
            a = q.a * M[0][0] + q.b * M[1][0]
            b = q.a * M[0][1] + q.b * M[1][1]
            c = q.a * v[0] + q.b * v[1] + q.c
            constraints.append(Ineq(a, b, c, q.strict))
    seen = set()
    unique: list[Ineq] = []
    for q in constraints:
        key = (q.a, q.b, q.c, q.strict)
        if key not in seen:
            seen.add(key)
            unique.append(q)
    poly = polygon_from_halfplanes([(q.a, q.b, q.c) for q in unique])
    if len(poly) < 3:
        raise EmptyFamily(code, reason="constraint polygon is empty")
    cx = sum(p[0] for p in poly) / len(poly)
    cy = sum(p[1] for p in poly) / len(poly)
    # representative member halfway between centroid and a vertex: the
    # centroid itself is the enclosed fixed point, which has period 1
    rx, ry = (cx + poly[0][0]) / 2, (cy + poly[0][1]) / 2
    return OrbitRecord(
        name=name, code=code, kind=PLANE_FAMILY,
        points=_iterate_code((rx, ry), code, params),
        trace=trace, det=det, eigenvalues=eig, stability=stability,
        existence=existence, vertices=tuple(poly), constraints=tuple(unique),
        notes=notes,
    )


def cycle_record_from_points(
    name: str, code, points, params: Parameters, existence: str = "", notes: str = ""
) -> OrbitRecord:
    """Build and fully verify a cycle record from explicit coordinates:
    each point must sit in its coded cell's closure and map exactly to
    the next point under that cell's affine law."""
    code = tuple(normalize_label(c) for c in code)
    points = tuple((frac(p[0]), frac(p[1])) for p in points)
    if len(points) != len(code):
        raise ValueError("one point per code symbol required")
    for i, p in enumerate(points):
        bad = _check_closure(p, code[i], params)
        if bad is not None:
            raise NoOrbit(code, step=i, point=p, constraint=_ineq_str(bad))
        nxt = region_piece(code[i], params).apply(p[0], p[1])
        if nxt != points[(i + 1) % len(points)]:
            raise NoOrbit(code, step=i, point=p,
                          reason=f"image {nxt} is not the next cycle point")
    A_tot, _, _ = _compose_code(code, params)
    trace, det = mtrace(A_tot), mdet(A_tot)
    return OrbitRecord(
        name=name, code=code, kind=CYCLE, points=points,
        trace=trace, det=det, eigenvalues=eigenvalue_pair(trace, det),
        stability=classify_stability(trace, det),
        existence=existence, notes=notes,
    )


def verify_cycle(record: OrbitRecord, params: Parameters) -> bool:
    """Check a cycle record dynamically: applying the full step map (with
    its own classification, not the coded pieces) walks the cycle and
    returns to the start with exact equality."""
    if record.kind != CYCLE:
        raise ValueError("verify_cycle applies to cycles")
    p = point3(*record.points[0])
    for _ in record.code:
        p, _, _ = apply_F(p, params)
    return tuple(p.coords) == record.points[0]


# ---------------------------------------------------------------------------
# parameter regions and the catalog


@dataclass(frozen=True)
class ParamRegion:
    index: int
    r_low: Scalar
    r_high: Scalar
    low_closed: bool
    high_closed: bool
    n_sources: int
    has_neutral_triangle: bool
    description: str


def _region_table(s: Scalar) -> list[ParamRegion]:
    b1 = (3 - 2 * s) / 9
    b2 = (3 + 8 * s) / 9
    b3 = 2 * (3 - s) / 9
    b4 = F(2, 3) + s
    lo = 2 * s
    hi = 1 - F(5, 3) * s
    return [
        ParamRegion(1, lo, b1, True, True, 3, True,
                    "neutral interior point, expanding 3-cycle, neutral polygon of period-3 points"),
        ParamRegion(2, b1, b2, False, True, 1, False, "one interior source"),
        ParamRegion(3, b2, b3, False, True, 3, True,
                    "neutral interior point, expanding 3-cycle, neutral polygon of period-3 points"),
        ParamRegion(4, b3, b4, False, True, 1, False, "one interior source"),
        ParamRegion(5, b4, hi, False, False, 3, True,
                    "neutral interior point, expanding 3-cycle, neutral polygon of period-3 points"),
    ]


def classify_parameters(params: Parameters) -> ParamRegion:
    """Which of the five parameter bands (ordered by r) the pair falls in."""
    r, s = params.r, params.s
    if not (2 * s <= r < 1 - F(5, 3) * s):
        raise OutsideStudiedWedge(
            f"(r, s)=({r}, {s}) outside 2s <= r < 1 - 5s/3"
        )
    for region in _region_table(s):
        above = r > region.r_low if not region.low_closed else r >= region.r_low
        below = r < region.r_high if not region.high_closed else r <= region.r_high
        if above and below:
            return region
    raise OutsideStudiedWedge(f"no band contains r={r} at s={s}")  # unreachable


@dataclass(frozen=True)
class NeutralTriangle:
    corners: tuple[Vector, Vector, Vector]
    region_index: int
    fixed_point: Vector
    edge_ineqs: tuple[Ineq, ...] = field(repr=False, default=())

    def contains(self, x1: Scalar, x2: Scalar, strict: bool = True) -> bool:
        if not self.edge_ineqs:
            # collapsed polygon: no interior at all
            return (not strict) and all(c == (x1, x2) for c in self.corners)
        if strict:
            return all(q.a * x1 + q.b * x2 + q.c > 0 for q in self.edge_ineqs)
        return all(q.a * x1 + q.b * x2 + q.c >= 0 for q in self.edge_ineqs)


def _triangle_edges(corners) -> tuple[Ineq, ...]:
    """Inward halfplane conditions of a triangle (empty when degenerate)."""
    (ax, ay), (bx, by), (cx, cy) = corners
    area2 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if area2 == 0:
        return ()
    sign = 1 if area2 > 0 else -1
    edges = []
    pts = [(ax, ay), (bx, by), (cx, cy)]
    for i in range(3):
        (x1, y1), (x2, y2) = pts[i], pts[(i + 1) % 3]
        a = sign * (y1 - y2)
        b = sign * (x2 - x1)
        c = sign * (x1 * y2 - x2 * y1)
        edges.append(Ineq(a, b, c))
    return tuple(edges)


def neutral_triangle(params: Parameters) -> NeutralTriangle:
    """The invariant polygon of neutral period-3 points, in parameter
    bands 1, 3, and 5.  Its corners trace the coexisting expanding
    3-cycle and it surrounds the neutral interior point."""
    region = classify_parameters(params)
    if region.index in (2, 4):
        raise NoTriangle(f"parameter band {region.index} has no neutral polygon")
    if region.index == 1:
        cycle = solve_code(("7", "7", "8"), params)
        fp = solve_code(("8",), params)
    elif region.index == 3:
        split = (3 + 2 * params.s) / 6
        code = ("7", "7", "6") if params.r <= split else ("6", "3", "3")
        cycle = solve_code(code, params)
        fp = solve_code(("6",), params)
    else:
        cycle = solve_code(("3", "3", "1"), params)
        fp = solve_code(("1",), params)
    corners = cycle.points
    return NeutralTriangle(
        corners=corners,
        region_index=region.index,
        fixed_point=fp.points[0],
        edge_ineqs=_triangle_edges(corners),
    )


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    code: tuple[str, ...]
    exists: Callable[[Parameters], bool]
    existence: str
    bounds: Callable[[Scalar], tuple[Scalar, Scalar]]
    notes: str = ""
    explicit_points: Optional[Callable[[Parameters], tuple]] = None


def _catalog_entries() -> tuple[CatalogEntry, ...]:
    f53 = F(5, 3)

    def wedge_hi(p):
        return 1 - f53 * p.s

    return (
        CatalogEntry("fixed-point-8", ("8",),
                     lambda p: 2 * p.s < p.r <= (3 - 2 * p.s) / 9,
                     "2s < r <= (3-2s)/9",
                     lambda s: (2 * s, (3 - 2 * s) / 9)),
        CatalogEntry("fixed-point-7", ("7",),
                     lambda p: (3 - 2 * p.s) / 9 <= p.r <= (3 + 8 * p.s) / 9,
                     "(3-2s)/9 <= r <= (3+8s)/9",
                     lambda s: ((3 - 2 * s) / 9, (3 + 8 * s) / 9)),
        CatalogEntry("fixed-point-6", ("6",),
                     lambda p: (3 + 8 * p.s) / 9 <= p.r <= 2 * (3 - p.s) / 9,
                     "(3+8s)/9 <= r <= 2(3-s)/9",
                     lambda s: ((3 + 8 * s) / 9, 2 * (3 - s) / 9)),
        CatalogEntry("fixed-point-3", ("3",),
                     lambda p: 2 * (3 - p.s) / 9 <= p.r <= F(2, 3) + p.s,
                     "2(3-s)/9 <= r <= 2/3+s",
                     lambda s: (2 * (3 - s) / 9, F(2, 3) + s)),
        CatalogEntry("fixed-point-1", ("1",),
                     lambda p: F(2, 3) + p.s <= p.r < wedge_hi(p),
                     "2/3+s <= r < 1-5s/3",
                     lambda s: (F(2, 3) + s, 1 - f53 * s)),
        CatalogEntry("corner-sync-cycle", ("1", "13", "9"),
                     lambda p: True, "whole studied wedge",
                     lambda s: (2 * s, 1 - f53 * s),
                     notes="synchronized solution seen by the section: all clusters at one phase"),
        CatalogEntry("cycle-7-7-8", ("7", "7", "8"),
                     lambda p: 2 * p.s < p.r <= (3 - 2 * p.s) / 9,
                     "2s < r <= (3-2s)/9",
                     lambda s: (2 * s, (3 - 2 * s) / 9)),
        CatalogEntry("cycle-7-7-6", ("7", "7", "6"),
                     lambda p: (3 + 8 * p.s) / 9 <= p.r <= (3 + 2 * p.s) / 6,
                     "(3+8s)/9 <= r <= (3+2s)/6",
                     lambda s: ((3 + 8 * s) / 9, (3 + 2 * s) / 6)),
        CatalogEntry("cycle-6-3-3", ("6", "3", "3"),
                     lambda p: (3 + 2 * p.s) / 6 <= p.r <= 2 * (3 - p.s) / 9,
                     "(3+2s)/6 <= r <= 2(3-s)/9",
                     lambda s: ((3 + 2 * s) / 6, 2 * (3 - s) / 9)),
        CatalogEntry("cycle-3-3-1", ("3", "3", "1"),
                     lambda p: F(2, 3) + p.s <= p.r < wedge_hi(p),
                     "2/3+s <= r < 1-5s/3",
                     lambda s: (F(2, 3) + s, 1 - f53 * s)),
        CatalogEntry("family-8-8-8", ("8", "8", "8"),
                     lambda p: 2 * p.s < p.r < (3 - 2 * p.s) / 9,
                     "2s < r < (3-2s)/9",
                     lambda s: (2 * s, (3 - 2 * s) / 9)),
        CatalogEntry("family-6-6-6", ("6", "6", "6"),
                     lambda p: (3 + 8 * p.s) / 9 < p.r < 2 * (3 - p.s) / 9,
                     "(3+8s)/9 < r < 2(3-s)/9",
                     lambda s: ((3 + 8 * s) / 9, 2 * (3 - s) / 9),
                     notes="coordinate ranges change regime at r=(3+2s)/6"),
        CatalogEntry("family-1-1-1", ("1", "1", "1"),
                     lambda p: F(2, 3) + p.s < p.r < wedge_hi(p),
                     "2/3+s < r < 1-5s/3",
                     lambda s: (F(2, 3) + s, 1 - f53 * s)),
        CatalogEntry("edge-family-1-1-11", ("1", "1", "11"),
                     lambda p: F(1, 2) + p.s < p.r < wedge_hi(p),
                     "1/2+s < r < 1-5s/3",
                     lambda s: (F(1, 2) + s, 1 - f53 * s),
                     notes="left-edge cascade family; transversally attracting, neutral along itself"),
        CatalogEntry("edge-cycle-2-1-11", ("2", "1", "11"),
                     lambda p: F(1, 2) + p.s <= p.r < wedge_hi(p),
                     "1/2+s <= r < 1-5s/3",
                     lambda s: (F(1, 2) + s, 1 - f53 * s)),
        CatalogEntry("edge-cycle-1-4-11", ("1", "4", "11"),
                     lambda p: F(1, 2) + p.s <= p.r < wedge_hi(p),
                     "1/2+s <= r < 1-5s/3",
                     lambda s: (F(1, 2) + s, 1 - f53 * s)),
        CatalogEntry("point-2-4-11", ("2", "4", "11"),
                     lambda p: (3 + 2 * p.s) / 6 <= p.r <= F(1, 2) + p.s,
                     "(3+2s)/6 <= r <= 1/2+s",
                     lambda s: ((3 + 2 * s) / 6, F(1, 2) + s),
                     notes="distinguished interior member of the 2-4-11 segment family",
                     explicit_points=_point_2_4_11),
        CatalogEntry("family-2-4-11", ("2", "4", "11"),
                     lambda p: F(1, 2) + p.s / 12 <= p.r <= F(1, 2) + p.s,
                     "1/2+s/12 <= r <= 1/2+s",
                     lambda s: (F(1, 2) + s / 12, F(1, 2) + s)),
        CatalogEntry("edge-cycle-2-8-11", ("2", "8", "11"),
                     lambda p: 2 * p.s < p.r <= F(1, 2) + p.s / 12,
                     "2s < r <= 1/2+s/12",
                     lambda s: (2 * s, F(1, 2) + s / 12)),
        CatalogEntry("edge-cycle-5-4-11", ("5", "4", "11"),
                     lambda p: p.r == (3 + 2 * p.s) / 6,
                     "exactly r = (3+2s)/6",
                     lambda s: ((3 + 2 * s) / 6, (3 + 2 * s) / 6)),
    )


def _point_2_4_11(params: Parameters) -> tuple:
    rho = params.r - params.s
    return (
        ((3 - 6 * rho) / 4, (3 - 2 * rho) / 4),
        (rho, (3 - 2 * rho) / 4),
        (rho, 2 * rho),
    )


@dataclass(frozen=True)
class CatalogResult:
    records: tuple[OrbitRecord, ...]
    skipped: tuple[tuple[str, str], ...]

    def by_name(self, name: str) -> OrbitRecord:
        for rec in self.records:
            if rec.name == name:
                return rec
        raise KeyError(name)

    def names(self) -> tuple[str, ...]:
        return tuple(rec.name for rec in self.records)


def catalog(params: Parameters) -> CatalogResult:
    """Every known orbit whose existence condition holds at the given
    parameters, solved exactly; the rest listed with a skip reason."""
    params.require_wedge()
    records: list[OrbitRecord] = []
    skipped: list[tuple[str, str]] = []
    lo_wedge, hi_wedge = 2 * params.s, 1 - F(5, 3) * params.s
    for entry in _catalog_entries():
        if not entry.exists(params):
            skipped.append((entry.name, f"outside existence condition {entry.existence}"))
            continue
        try:
            if entry.explicit_points is not None:
                rec = cycle_record_from_points(
                    entry.name, entry.code, entry.explicit_points(params), params,
                    existence=entry.existence, notes=entry.notes,
                )
            else:
                rec = solve_code(entry.code, params, name=entry.name,
                                 existence=entry.existence, notes=entry.notes)
            lo, hi = entry.bounds(params.s)
            rec = replace(rec, existence_bounds=(max(lo, lo_wedge), min(hi, hi_wedge)))
            records.append(rec)
        except NoOrbit as exc:
            skipped.append((entry.name, str(exc)))
    return CatalogResult(tuple(records), tuple(skipped))


def _q(x: Scalar) -> str:
    return f"{x.numerator}/{x.denominator}"


def _qpair(v: Vector) -> list[str]:
    return [_q(v[0]), _q(v[1])]


def record_json(rec: OrbitRecord) -> dict:
    """Lossless JSON form of one orbit record: rationals as "p/q" strings,
    eigenvalue data both exact (trace, det) and as float moduli."""
    m1, m2 = (abs(z) for z in rec.eigenvalues)
    out = {
        "name": rec.name,
        "code": list(rec.code),
        "kind": rec.kind,
        "stability": rec.stability,
        "trace": _q(rec.trace),
        "det": _q(rec.det),
        "eigenvalue_moduli": [m1, m2],
        "points": [_qpair(p) for p in rec.points],
        "existence": rec.existence,
        "existence_r": None,
        "notes": rec.notes,
    }
    if rec.existence_bounds is not None:
        out["existence_r"] = {"low": _q(rec.existence_bounds[0]),
                              "high": _q(rec.existence_bounds[1])}
    if rec.kind == LINE_FAMILY:
        out["base"] = _qpair(rec.base)
        out["direction"] = _qpair(rec.direction)
        out["t_range"] = [_q(rec.t_range[0]), _q(rec.t_range[1])]
        out["t_open"] = list(rec.t_open)
    if rec.kind == PLANE_FAMILY:
        out["vertices"] = [_qpair(v) for v in rec.vertices]
    return out


def catalog_json(result: CatalogResult, params: Parameters) -> dict:
    return {
        "r": _q(params.r),
        "s": _q(params.s),
        "records": [record_json(rec) for rec in result.records],
        "skipped": [{"name": nm, "reason": why} for nm, why in result.skipped],
    }


# ---------------------------------------------------------------------------
# transition graph

TRANSITION_TARGETS: dict[str, tuple[str, ...]] = {
    "1": ("8", "13"),
    "2": ("8", "13"),
    "3a": ("8", "13"),
    "3b": ("8", "13"),
    "4": ("8", "13"),
    "5": ("1", "3a", "3b", "4", "6", "7", "8"),
    "6": ("1", "3a", "3b", "4", "6", "7", "8"),
    "7": ("6", "7", "8", "13"),
    "8": ("6", "7", "11", "12", "13"),
    "9": ("1",),
    "10": ("1",),
    "11": ("1", "2", "3a"),
    "12": ("5",),
    "13": ("5", "9", "10"),
}


def corrected_transition_targets(params: Parameters) -> dict[str, tuple[str, ...]]:
    """Transition sets amended with the two cells the nominal table
    misses: cell 7 also reaches 12 when r > 1/2 - 5s/6, and cell 8 also
    reaches itself when r < 1/2 - 5s/6.  At equality the nominal table
    is exact."""
    threshold = F(1, 2) - F(5, 6) * params.s
    targets = dict(TRANSITION_TARGETS)
    if params.r > threshold:
        targets["7"] = targets["7"] + ("12",)
    if params.r < threshold:
        targets["8"] = targets["8"] + ("8",)
    return targets


@dataclass(frozen=True)
class Violation:
    region: str
    point: Vector
    image: Vector
    image_label: str


@dataclass(frozen=True)
class TransitionGraph:
    adjacency: dict[str, tuple[str, ...]]


def observed_transitions(
    params: Parameters,
    samples_per_region: int = 200,
    seed: int = 0,
    targets: Optional[dict[str, tuple[str, ...]]] = None,
) -> tuple[dict[str, tuple[str, ...]], list[Violation]]:
    """Sample every cell (interior points plus closure vertices), map each
    sample once, and compare the landing cells against the target table.

    A sample counts as a violation only when its image lies outside the
    closure of every allowed cell, so boundary landings that the
    half-open classifier assigns to a neighbor are not false alarms.
    """
    params.require_subcase_a()
    if targets is None:
        targets = TRANSITION_TARGETS
    rng = random.Random(seed)
    adjacency: dict[str, set] = {}
    violations: list[Violation] = []
    for label in PIECE_ORDER:
        pts = list(region_polygon(label, params))
        pts += sample_region(label, params, rng, samples_per_region)
        seen: set[str] = set()
        closure_tests = [region_contains_closure(t, params) for t in targets[label]]
        for (x1, x2) in pts:
            iy = piece_map(params)[label].apply(x1, x2)
            img_label = classify_xy(iy[0], iy[1], params)
            seen.add(img_label)
            if img_label not in targets[label]:
                if not any(test(iy[0], iy[1]) for test in closure_tests):
                    violations.append(Violation(label, (x1, x2), iy, img_label))
        adjacency[label] = tuple(sorted(seen, key=PIECE_ORDER.index))
    return adjacency, violations


def transition_graph(
    params: Parameters, samples_per_region: int = 200, seed: int = 0
) -> TransitionGraph:
    """Observed adjacency under the nominal target table; raises
    InclusionViolation on the first sample that escapes it."""
    adjacency, violations = observed_transitions(params, samples_per_region, seed)
    if violations:
        v = violations[0]
        raise InclusionViolation(v.region, v.point, v.image, v.image_label)
    return TransitionGraph(adjacency)


# ---------------------------------------------------------------------------
# critical parameter values


def bifurcation_boundaries(s) -> list[tuple[Scalar, str]]:
    """Critical r values for a given signalling width, ascending, with
    event descriptions.  Coinciding values are merged into one entry."""
    s = frac(s)
    if not 0 < s < F(3, 11):
        raise WedgeViolation(f"wedge is empty at s={s}")
    raw = [
        (2 * s, "lower wedge edge: ordering constraint r = 2s"),
        ((3 - 2 * s) / 9,
         "pitchfork-like exchange of the interior points in cells 7 and 8; "
         "expanding cycle 7-7-8 and the neutral polygon exist below"),
        (F(1, 2) - F(5, 6) * s,
         "transition-table change: cell 8 stops reaching itself, cell 7 starts reaching 12"),
        ((3 + 8 * s) / 9,
         "pitchfork-like exchange of the interior points in cells 7 and 6; "
         "expanding cycle 7-7-6 and the neutral polygon exist above"),
        (F(1, 2) + s / 12,
         "saddle-node-like merge of the edge cycles 2-8-11 and the boundary member "
         "of the 2-4-11 family"),
        ((3 + 2 * s) / 6,
         "itinerary exchange 7-7-6 to 6-3-3 (one continuing cycle); the edge cycle "
         "5-4-11 exists exactly here and the 2-4-11 family's lower end switches "
         "binding constraint"),
        (F(1, 2) + s,
         "edge cycles 2-1-11 and 1-4-11 merge; left-edge family 1-1-11 exists above; "
         "the 2-4-11 family reaches the signalling corner"),
        (2 * (3 - s) / 9,
         "pitchfork-like exchange of the interior points in cells 6 and 3; "
         "neutral polygon collapses at the boundary"),
        (F(2, 3) + s,
         "pitchfork-like exchange of the interior points in cells 3 and 1; "
         "expanding cycle 3-3-1 and the neutral polygon exist above"),
        (1 - F(5, 3) * s, "upper wedge edge: r + 5s/3 = 1"),
    ]
    merged: dict[Scalar, list[str]] = {}
    for value, tag in raw:
        merged.setdefault(value, []).append(tag)
    return [(v, "; ".join(tags)) for v, tags in sorted(merged.items())]
