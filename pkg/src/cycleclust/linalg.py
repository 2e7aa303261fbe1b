"""Small exact linear-algebra helpers for 2x2 affine maps.

Matrices are tuples of row tuples of Fractions.  Everything here is
rank-aware because the orbit solver needs to distinguish isolated
solutions (rank 2), line families (rank 1), and plane families (rank 0)
of (I - A) p = b.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .model import Scalar

Matrix = tuple[tuple[Scalar, Scalar], tuple[Scalar, Scalar]]
Vector = tuple[Scalar, Scalar]

IDENTITY: Matrix = (
    (Fraction(1), Fraction(0)),
    (Fraction(0), Fraction(1)),
)


def mmul(a: Matrix, b: Matrix) -> Matrix:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def mvec(a: Matrix, v: Vector) -> Vector:
    return (a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1])


def madd(u: Vector, v: Vector) -> Vector:
    return (u[0] + v[0], u[1] + v[1])


def msub(a: Matrix, b: Matrix) -> Matrix:
    return (
        (a[0][0] - b[0][0], a[0][1] - b[0][1]),
        (a[1][0] - b[1][0], a[1][1] - b[1][1]),
    )


def mdet(a: Matrix) -> Scalar:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def mtrace(a: Matrix) -> Scalar:
    return a[0][0] + a[1][1]


def solve_affine(
    system: Matrix, rhs: Vector
) -> Optional[tuple[Vector, tuple[Vector, ...]]]:
    """Solve system @ p = rhs exactly.

    Returns None when inconsistent; otherwise (particular, basis) where
    basis spans the kernel: () for a unique solution, one vector for a
    line of solutions, two for the whole plane.
    """
    (a, b), (c, d) = system
    e, f = rhs
    det = a * d - b * c
    if det != 0:
        return ((d * e - b * f) / det, (a * f - c * e) / det), ()
    # rank <= 1: find a nonzero row if any
    if a == b == c == d == 0:
        if e == 0 and f == 0:
            return (Fraction(0), Fraction(0)), ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
        return None
    if a != 0 or b != 0:
        row, val, other_row, other_val = (a, b), e, (c, d), f
    else:
        row, val, other_row, other_val = (c, d), f, (a, b), e
    # consistency: other row must be a multiple of the pivot row
    ra, rb = row
    oa, ob = other_row
    if ra != 0:
        scale = oa / ra
    else:
        scale = ob / rb
    if (oa, ob) != (scale * ra, scale * rb) or other_val != scale * val:
        return None
    if ra != 0:
        particular = (val / ra, Fraction(0))
    else:
        particular = (Fraction(0), val / rb)
    kernel = (rb, -ra)
    return particular, (kernel,)


def polygon_from_halfplanes(
    halfplanes: Sequence[tuple[Scalar, Scalar, Scalar]],
) -> list[Vector]:
    """Vertices of {x : a*x1 + b*x2 + c >= 0 for all (a, b, c)}.

    Intersects boundary lines pairwise, keeps feasible points, then sorts
    counterclockwise around the centroid.  Assumes the region is bounded;
    returns [] when infeasible or degenerate.
    """
    pts: list[Vector] = []
    n = len(halfplanes)
    for i in range(n):
        a1, b1, c1 = halfplanes[i]
        for j in range(i + 1, n):
            a2, b2, c2 = halfplanes[j]
            det = a1 * b2 - a2 * b1
            if det == 0:
                continue
            x = (b1 * c2 - b2 * c1) / det
            y = (a2 * c1 - a1 * c2) / det
            if all(a * x + b * y + c >= 0 for a, b, c in halfplanes):
                if (x, y) not in pts:
                    pts.append((x, y))
    if len(pts) < 3:
        return pts
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)

    def angle_key(p: Vector):
        import math

        return math.atan2(float(p[1] - cy), float(p[0] - cx))

    pts.sort(key=angle_key)
    return pts
