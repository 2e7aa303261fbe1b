"""The 14-cell affine chart of the one-step map (k=3): classification,
exact agreement with the simulated flow, corner images, sampling."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from cycleclust.flow import map_F_simulated
from cycleclust.model import Parameters, WedgeViolation, point3
from cycleclust.pieces import (
    CELLS_OF_REGION,
    PIECE_ORDER,
    apply_F,
    band_of,
    build_pieces,
    chart_vertices,
    classify_region,
    classify_xy,
    partition_json,
    piece_map,
    region_contains_closure,
    region_polygon,
    sample_region,
    vertex_images,
)

F = Fraction

HEAD = Parameters(F(5, 12), F(1, 8))


def test_piece_table_shape():
    pieces = build_pieces(HEAD)
    assert tuple(p.label for p in pieces) == PIECE_ORDER
    assert CELLS_OF_REGION["3"] == ("3a", "3b")
    with pytest.raises(WedgeViolation):
        build_pieces(Parameters(F(1, 2), F(3, 10)))


def test_classification_examples():
    assert classify_xy(F(1, 10), F(1, 5), HEAD) == "1"
    assert classify_xy(F(1, 20), F(7, 20), HEAD) == "2"
    assert classify_xy(F(9, 10), F(19, 20), HEAD) == "13"
    assert classify_region(point3(F(19, 60), F(77, 120)), HEAD) == "7"
    # the two sub-cells sharing one affine law
    assert classify_xy(F(1, 16), F(5, 16), HEAD) == "3a"
    assert classify_xy(F(1, 5), F(3, 10), HEAD) == "3b"
    assert piece_map(HEAD)["3a"].A == piece_map(HEAD)["3b"].A


def test_every_triangle_point_classifies():
    rng = random.Random(9)
    for _ in range(200):
        a = F(rng.randint(0, 500), 500)
        b = F(rng.randint(0, 500), 500)
        x1, x2 = (a, b) if a <= b else (b, a)
        label = classify_xy(x1, x2, HEAD)
        assert label in PIECE_ORDER
        assert piece_map(HEAD)[label].contains(x1, x2)


def test_apply_F_matches_flow_exactly():
    # spot check here; the acceptance suite runs the large version
    rng = random.Random(5)
    for params in (HEAD, Parameters(F(7, 10), F(1, 20))):
        for _ in range(150):
            a = F(rng.randint(0, 720), 720)
            b = F(rng.randint(0, 720), 720)
            x1, x2 = (a, b) if a <= b else (b, a)
            p = point3(x1, x2)
            closed, t_closed, _ = apply_F(p, params)
            simulated, t_sim, _ = map_F_simulated(p, params)
            assert closed.coords == simulated.coords
            assert t_closed == t_sim


def test_division_time_is_first_image_coordinate():
    rng = random.Random(17)
    for _ in range(100):
        a = F(rng.randint(0, 99), 99)
        b = F(rng.randint(0, 99), 99)
        x1, x2 = (a, b) if a <= b else (b, a)
        img, t1, _ = apply_F(point3(x1, x2), HEAD)
        assert t1 == img.coords[0]


def test_region_polygons_nonempty():
    for label in PIECE_ORDER:
        poly = region_polygon(label, HEAD)
        assert len(poly) >= 3, label


def test_sample_region_respects_label():
    rng = random.Random(1)
    for label in ("1", "7", "12", "3a", "10"):
        pts = sample_region(label, HEAD, rng, 30)
        assert len(pts) == 30
        for x1, x2 in pts:
            assert classify_xy(x1, x2, HEAD) == label


def test_region_closure_union():
    inside3 = region_contains_closure("3", HEAD)
    assert inside3(F(1, 16), F(5, 16))
    assert inside3(F(1, 5), F(3, 10))
    assert not inside3(F(1, 2), F(3, 4))


def test_band_of():
    assert band_of(F(1, 16), HEAD) == "signal"
    assert band_of(F(1, 8), HEAD) == "low_gap"
    assert band_of(F(7, 24), HEAD) == "high_gap"
    assert band_of(F(5, 12), HEAD) == "feedback"
    assert band_of(F(1), HEAD) == "feedback"


def test_vertex_images_frozen_table():
    r, s = HEAD.r, HEAD.s
    expected = {
        "left_mid_low": (1 - r + s, 1 - r + s),
        "diag_mid": (1 - r + s, F(1)),
        "left_feedback": (1 - r - 2 * s / 3, 1 - r - 2 * s / 3),
        "signal_feedback": (1 - r - s / 3, 1 - r + 2 * s / 3),
        "gapend_feedback": (1 - r - s / 3, 1 - 4 * s / 3),
        "diag_feedback": (1 - r - s / 3, F(1)),
        "left_highband": (s, s),
        "signal_highband": (s, 2 * s),
        "gapend_highband": (s, r),
        "feedback_highband": (s, r + 4 * s / 3),
        "diag_highband": (s, F(1)),
        "signal_top": (F(0), s),
        "feedback_top": (F(0), r),
    }
    table = vertex_images(HEAD)
    assert set(table) == set(expected)
    for name, want in expected.items():
        assert table[name]["image"] == want, name
    # images of chart corners land on chart corners or shared points
    verts = chart_vertices(HEAD)
    assert table["gapend_highband"]["image"] == verts["signal_feedback"]
    assert table["feedback_top"]["image"] == verts["left_feedback"]


def test_partition_json_exact_strings():
    doc = partition_json(HEAD)
    assert doc["r"] == "5/12" and doc["s"] == "1/8"
    labels = [cell["label"] for cell in doc["pieces"]]
    assert labels == list(PIECE_ORDER)
    for cell in doc["pieces"]:
        assert len(cell["vertices"]) >= 3
        assert len(cell["A"]) == 2 and len(cell["b"]) == 2
