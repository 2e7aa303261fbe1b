"""Closed-form 3-cluster step map as 13 affine pieces on the triangle.

For parameters in the wedge 2s < r < 1 - 5s/3 the ordered triangle
0 <= x1 <= x2 <= 1 splits into 13 convex polygonal cells (cell 3 is
stored as two convex halves, so 14 piece objects cover 13 cells).  On
each cell the step map is affine: image = A (x1, x2) + b.  The cell
conditions are half-open so that every point belongs to exactly one
cell; the map is continuous, so values agree on shared boundaries.

Everything is generated symbolically from (r, s) at construction time,
and cached per parameter pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .linalg import Matrix, Vector, polygon_from_halfplanes
from .model import Parameters, Scalar, SimplexPoint, frac, point3

F = Fraction

PIECE_ORDER = (
    "1", "2", "3a", "3b", "4", "5", "6", "7", "8", "9", "10", "11", "12", "13",
)

# region "3" is the union of the two stored cells
CELLS_OF_REGION = {
    **{lab: (lab,) for lab in PIECE_ORDER},
    "3": ("3a", "3b"),
}


class Unclassifiable(RuntimeError):
    """A triangle point matched no cell: the cell table is broken."""


@dataclass(frozen=True)
class Ineq:
    """Linear membership condition a*x1 + b*x2 + c >= 0 (or > 0 if strict)."""

    a: Scalar
    b: Scalar
    c: Scalar
    strict: bool = False

    def holds(self, x1: Scalar, x2: Scalar) -> bool:
        v = self.a * x1 + self.b * x2 + self.c
        return v > 0 if self.strict else v >= 0

    def holds_closure(self, x1: Scalar, x2: Scalar) -> bool:
        return self.a * x1 + self.b * x2 + self.c >= 0


@dataclass(frozen=True)
class AffinePiece:
    label: str
    ineqs: tuple[Ineq, ...]
    A: Matrix
    b: Vector

    def contains(self, x1: Scalar, x2: Scalar) -> bool:
        return all(q.holds(x1, x2) for q in self.ineqs)

    def contains_closure(self, x1: Scalar, x2: Scalar) -> bool:
        return all(q.holds_closure(x1, x2) for q in self.ineqs)

    def apply(self, x1: Scalar, x2: Scalar) -> Vector:
        return (
            self.A[0][0] * x1 + self.A[0][1] * x2 + self.b[0],
            self.A[1][0] * x1 + self.A[1][1] * x2 + self.b[1],
        )


@lru_cache(maxsize=128)
def build_pieces(params: Parameters) -> tuple[AffinePiece, ...]:
    """All pieces of the step map, in canonical label order."""
    params.require_wedge()
    r, s = params.r, params.s
    one = F(1)

    def ineq(a, b, c, strict=False) -> Ineq:
        return Ineq(frac(a), frac(b), frac(c), strict)

    def mat(a11, a12, a21, a22) -> Matrix:
        return ((frac(a11), frac(a12)), (frac(a21), frac(a22)))

    x1_nonneg = ineq(1, 0, 0)
    x1_low = ineq(-1, 0, s)            # x1 <= s
    x1_mid = ineq(-1, 0, r - s)        # x1 <= r - s
    x1_over_s = ineq(1, 0, -s, True)   # x1 > s
    x1_over_mid = ineq(1, 0, -(r - s), True)  # x1 > r - s
    x1_to_r = ineq(-1, 0, r)           # x1 <= r
    x1_over_r = ineq(1, 0, -r, True)   # x1 > r
    ordered = ineq(-1, 1, 0)           # x2 >= x1
    x2_top = ineq(0, -1, 1)            # x2 <= 1

    pieces = (
        AffinePiece(
            "1",
            (x1_nonneg, ordered, ineq(0, -1, r - s, True)),
            mat(0, -1, 1, -1),
            (one, one),
        ),
        AffinePiece(
            "2",
            (x1_nonneg, x1_low, ineq(-1, 1, -(r - s)), ineq(0, -1, r, True)),
            mat(F(1, 3), F(-5, 3), F(4, 3), F(-5, 3)),
            (1 + F(2, 3) * (r - s), 1 + F(2, 3) * (r - s)),
        ),
        AffinePiece(
            "3a",
            (x1_nonneg, x1_low, ineq(0, 1, -(r - s)), ineq(1, -1, r - s, True)),
            mat(0, F(-4, 3), 1, F(-4, 3)),
            (1 + (r - s) / 3, 1 + (r - s) / 3),
        ),
        AffinePiece(
            "3b",
            (x1_over_s, x1_mid, ineq(0, 1, -(r - s)), ineq(0, -1, r, True)),
            mat(0, F(-4, 3), 1, F(-4, 3)),
            (1 + (r - s) / 3, 1 + (r - s) / 3),
        ),
        AffinePiece(
            "4",
            (x1_over_mid, ordered, ineq(0, -1, r, True)),
            mat(0, F(-4, 3), F(4, 3), F(-4, 3)),
            (1 + (r - s) / 3, one),
        ),
        AffinePiece(
            "5",
            (x1_nonneg, x1_low, ineq(0, 1, -r), ineq(1, -3, 3 - 5 * s, True)),
            mat(F(1, 3), -1, F(4, 3), -1),
            (1 - F(2, 3) * s, 1 - F(2, 3) * s),
        ),
        AffinePiece(
            "6",
            (x1_over_s, x1_mid, ineq(0, 1, -r), ineq(0, -3, 3 - 4 * s, True)),
            mat(0, -1, 1, -1),
            (1 - s / 3, 1 - s / 3),
        ),
        AffinePiece(
            "7",
            (x1_over_mid, x1_to_r, ineq(0, 1, -r), ineq(0, -3, 3 - 4 * s)),
            mat(0, -1, F(4, 3), -1),
            (1 - s / 3, 1 - r / 3),
        ),
        AffinePiece(
            "8",
            (x1_over_r, ordered, ineq(0, -3, 3 - 4 * s)),
            mat(0, -1, 1, -1),
            (1 - s / 3, one),
        ),
        AffinePiece(
            "9",
            (x1_nonneg, x1_low, ineq(-5, 3, 5 * s - 3), x2_top),
            mat(0, F(-3, 5), 1, F(-3, 5)),
            (F(3, 5), F(3, 5)),
        ),
        AffinePiece(
            "10",
            (x1_nonneg, x1_low, ineq(-1, 3, 5 * s - 3), ineq(5, -3, 3 - 5 * s, True)),
            mat(F(1, 4), F(-3, 4), F(5, 4), F(-3, 4)),
            ((3 - s) / 4, (3 - s) / 4),
        ),
        AffinePiece(
            "11",
            (x1_over_s, ineq(-4, 3, 4 * r - 3), ineq(0, 3, 4 * s - 3), x2_top),
            mat(0, F(-3, 4), 1, F(-3, 4)),
            (F(3, 4), F(3, 4)),
        ),
        AffinePiece(
            "12",
            (ineq(4, -3, 3 - 4 * r, True), x1_to_r, ineq(0, 3, 4 * s - 3), x2_top),
            mat(0, F(-3, 4), F(4, 3), -1),
            (F(3, 4), 1 - r / 3),
        ),
        AffinePiece(
            "13",
            (x1_over_r, ordered, ineq(0, 3, 4 * s - 3, True), x2_top),
            mat(0, F(-3, 4), 1, -1),
            (F(3, 4), one),
        ),
    )
    assert tuple(p.label for p in pieces) == PIECE_ORDER
    return pieces


@lru_cache(maxsize=128)
def piece_map(params: Parameters) -> dict[str, AffinePiece]:
    return {p.label: p for p in build_pieces(params)}


def normalize_label(label) -> str:
    lab = str(label)
    if lab not in CELLS_OF_REGION:
        raise ValueError(f"unknown region label {label!r}")
    return lab


def classify_xy(x1: Scalar, x2: Scalar, params: Parameters) -> str:
    """Cell label of a raw coordinate pair; lowest label wins ties
    (the half-open conditions make ties impossible in practice)."""
    for piece in build_pieces(params):
        if piece.contains(x1, x2):
            return piece.label
    raise Unclassifiable(f"({x1}, {x2}) matched no cell at (r, s)=({params.r}, {params.s})")


def classify_region(p: SimplexPoint, params: Parameters) -> str:
    return classify_xy(p.coords[0], p.coords[1], params)


def apply_F(p: SimplexPoint, params: Parameters) -> tuple[SimplexPoint, Scalar, str]:
    """One closed-form step: (image, division time, cell label).

    The division time equals the image's first coordinate: the leading
    cluster moves at speed 1 until it enters the feedback window, and by
    then no cluster can be signalling, so its phase at the division
    instant is the elapsed time itself.
    """
    label = classify_xy(p.coords[0], p.coords[1], params)
    image = piece_map(params)[label].apply(p.coords[0], p.coords[1])
    return SimplexPoint(3, image), image[0], label


def region_contains_closure(label, params: Parameters) -> Callable[[Scalar, Scalar], bool]:
    """Closure membership test for a region label ("3" = union of 3a, 3b)."""
    cells = [piece_map(params)[c] for c in CELLS_OF_REGION[normalize_label(label)]]

    def test(x1: Scalar, x2: Scalar) -> bool:
        return any(c.contains_closure(x1, x2) for c in cells)

    return test


def region_piece(label, params: Parameters) -> AffinePiece:
    """The affine piece used for a code symbol; "3" maps to the shared
    affine law of cells 3a and 3b."""
    lab = normalize_label(label)
    cells = CELLS_OF_REGION[lab]
    return piece_map(params)[cells[0]]


def region_polygon(label, params: Parameters) -> list[Vector]:
    """Closure vertices of one cell, counterclockwise."""
    piece = piece_map(params)[str(label)]
    halfplanes = [(q.a, q.b, q.c) for q in piece.ineqs]
    # bound with the triangle's own closure in case a cell omits a side
    halfplanes += [(F(1), F(0), F(0)), (F(-1), F(1), F(0)), (F(0), F(-1), F(1))]
    return polygon_from_halfplanes(halfplanes)


def _polygon_area2(poly: list[Vector]) -> Scalar:
    total = F(0)
    for i in range(len(poly)):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % len(poly)]
        total += x1 * y2 - x2 * y1
    return abs(total)


def sample_region(label, params: Parameters, rng, n: int, denom: int = 2520) -> list[Vector]:
    """n random rational points classified exactly into the given cell.

    Fan-triangulates the cell's closure polygon, samples triangles by
    area, and resamples the rare draws that land on a boundary owned by
    a neighboring cell.
    """
    label = str(label)
    poly = region_polygon(label, params)
    if len(poly) < 3:
        raise ValueError(f"cell {label} has empty interior at these parameters")
    tris = [(poly[0], poly[i], poly[i + 1]) for i in range(1, len(poly) - 1)]
    weights = [float(_polygon_area2(list(t))) for t in tris]
    total = sum(weights)
    out: list[Vector] = []
    while len(out) < n:
        u = rng.random() * total
        acc = 0.0
        tri = tris[-1]
        for t, w in zip(tris, weights):
            acc += w
            if u <= acc:
                tri = t
                break
        a, b, c = tri
        i = rng.randint(0, denom)
        j = rng.randint(0, denom)
        if i + j > denom:
            i, j = denom - i, denom - j
        u1, u2 = F(i, denom), F(j, denom)
        x1 = a[0] + u1 * (b[0] - a[0]) + u2 * (c[0] - a[0])
        x2 = a[1] + u1 * (b[1] - a[1]) + u2 * (c[1] - a[1])
        if classify_xy(x1, x2, params) == label:
            out.append((x1, x2))
    return out


BAND_NAMES = ("signal", "low_gap", "high_gap", "feedback")


def band_of(x: Scalar, params: Parameters) -> str:
    """Which window an abscissa falls in: signalling [0,s), lower gap
    [s, r-s), upper gap [r-s, r), or feedback [r, 1]."""
    if x < params.s:
        return "signal"
    if x < params.r - params.s:
        return "low_gap"
    if x < params.r:
        return "high_gap"
    return "feedback"


def chart_vertices(params: Parameters) -> dict[str, Vector]:
    """The distinguished corner points of the cell chart, named by
    location (left edge x1=0, diagonal x1=x2, window boundaries)."""
    r, s = params.r, params.s
    top = 1 - F(4, 3) * s
    return {
        "left_mid_low": (F(0), r - s),
        "diag_mid": (r - s, r - s),
        "left_feedback": (F(0), r),
        "signal_feedback": (s, r),
        "gapend_feedback": (r - s, r),
        "diag_feedback": (r, r),
        "left_highband": (F(0), 1 - F(5, 3) * s),
        "signal_highband": (s, top),
        "gapend_highband": (r - s, top),
        "feedback_highband": (r, top),
        "diag_highband": (top, top),
        "signal_top": (s, F(1)),
        "feedback_top": (r, F(1)),
    }


def vertex_images(params: Parameters) -> dict[str, dict]:
    """Image and band data of every named chart vertex."""
    out = {}
    for name, (x1, x2) in chart_vertices(params).items():
        image, t1, label = apply_F(point3(x1, x2), params)
        out[name] = {
            "point": (x1, x2),
            "image": tuple(image.coords),
            "source_cell": label,
            "image_cell": classify_xy(image.coords[0], image.coords[1], params),
            "image_bands": (
                band_of(image.coords[0], params),
                band_of(image.coords[1], params),
            ),
        }
    return out


def _rat(x: Scalar) -> str:
    return f"{x.numerator}/{x.denominator}"


def partition_json(params: Parameters) -> dict:
    """Exact JSON description of the cell partition, for replotting."""
    return {
        "r": _rat(params.r),
        "s": _rat(params.s),
        "pieces": [
            {
                "label": p.label,
                "inequalities": [
                    {"a": _rat(q.a), "b": _rat(q.b), "c": _rat(q.c), "strict": q.strict}
                    for q in p.ineqs
                ],
                "A": [[_rat(v) for v in row] for row in p.A],
                "b": [_rat(v) for v in p.b],
                "vertices": [[_rat(v[0]), _rat(v[1])] for v in region_polygon(p.label, params)],
            }
            for p in build_pieces(params)
        ],
    }
