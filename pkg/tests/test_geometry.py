import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linepair import oracles
from linepair.annotations import rbox_to_segments
from linepair.errors import DegenerateBox, DegeneratePentagon, DegeneratePolygon, HeadUnresolved
from linepair.geometry import (clip_convex, form_iou, hbb_from_pair, hbb_iou, is_convex, is_simple,
                               pentagon_from_pair, polygon_iou, rbb_from_pair, signed_area)
from linepair.shapes import HorizontalBox, RotatedBox

from conftest import det, seg

HAND = det(seg(0, 10, 0, -4), seg(-6, 2, 6, 2))
SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def _rot90(d):
    r = lambda p: (-p[1], p[0])
    return det(seg(*r(d.l1.p0), *r(d.l1.p1)), seg(*r(d.l2.p0), *r(d.l2.p1)))


def random_det(rng, head=True):
    while True:
        c = rng.uniform(-200, 200, 2)
        a = rng.uniform(-math.pi, math.pi)
        u = np.array([math.cos(a), math.sin(a)])
        lf = rng.uniform(10, 120)
        lw = lf * rng.uniform(0.6, 1.4)
        wa = a + math.radians(rng.uniform(62, 118))
        w = np.array([math.cos(wa), math.sin(wa)])
        mid = c + rng.uniform(-0.3, 0.3) * lf * u
        t = rng.uniform(0.36, 0.64)
        l1 = seg(*(c + lf / 2 * u), *(c - lf / 2 * u))
        l2 = seg(*(mid - t * lw * w), *(mid + (1 - t) * lw * w))
        return det(l1, l2, 1.0, head)


def test_hbb_hand_example():
    assert hbb_from_pair(HAND).to_list() == [-6.0, -4.0, 6.0, 10.0]


def test_hbb_rotation_swaps_extents():
    b = hbb_from_pair(_rot90(HAND))
    assert b.to_list() == [-10.0, -6.0, 4.0, 6.0]


def test_hbb_is_endpoint_minmax(rng):
    for _ in range(50):
        d = random_det(rng)
        pts = [d.l1.p0, d.l1.p1, d.l2.p0, d.l2.p1]
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        assert hbb_from_pair(d).to_list() == [min(xs), min(ys), max(xs), max(ys)]


def test_hbb_degenerate():
    with pytest.raises(DegenerateBox):
        hbb_from_pair(det(seg(0, 0, 0, 10), seg(0, 3, 0, 6)))


def test_rbb_hand_example():
    b = rbb_from_pair(HAND)
    assert (b.cx, b.cy, b.w, b.h) == pytest.approx((0.0, 3.0, 14.0, 12.0))
    assert b.angle == pytest.approx(math.pi / 2)


def test_rbb_horizontal_cross():
    b = rbb_from_pair(det(seg(0, 0, 10, 0), seg(5, -3, 5, 3)))
    assert b.angle == 0.0 and (b.w, b.h) == pytest.approx((10.0, 6.0))


def test_rbb_contains_endpoints(rng):
    for _ in range(50):
        d = random_det(rng)
        b = rbb_from_pair(d)
        u, v = b.axes()
        for p in (d.l1.p0, d.l1.p1, d.l2.p0, d.l2.p1):
            q = np.subtract(p, b.center)
            assert abs(q @ u) <= b.w / 2 + 1e-9 and abs(q @ v) <= b.h / 2 + 1e-9


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(2, 60), st.floats(2, 60), st.floats(0, math.pi - 1e-6))
def test_rbb_round_trip_recovers_lines(cx, cy, w, h, angle):
    l1, l2 = rbox_to_segments(RotatedBox(cx, cy, w, h, angle))
    b = rbb_from_pair(det(l1, l2))

    def line(s):
        d = s.direction / s.length
        return d, s.p0

    def same_line(a, c):
        (da, pa), (dc, pc) = line(a), line(c)
        off = np.subtract(pc, pa)
        return abs(abs(float(da @ dc)) - 1) < 1e-9 and abs(da[0] * off[1] - da[1] * off[0]) < 1e-7

    m1, m2 = rbox_to_segments(b)
    # a square box has no preferred long side, so the two lines may trade roles
    assert (same_line(l1, m1) and same_line(l2, m2)) or (same_line(l1, m2) and same_line(l2, m1))
    if abs(w - h) > 1e-6:
        assert same_line(l1, m1)


def test_pentagon_hand_example():
    p = pentagon_from_pair(det(seg(0, 10, 0, 0), seg(-6, 2, 6, 2)))
    np.testing.assert_allclose(p.as_array(), [(0, 10), (6, 2), (1.2, 0), (-1.2, 0), (-6, 2)], atol=1e-12)
    assert math.dist(p.bottom_right, p.bottom_left) == pytest.approx(2.4, abs=1e-12)
    assert p.head == (0, 10) and p.right_wing == pytest.approx((6, 2))


def test_pentagon_ignores_wing_order():
    a = pentagon_from_pair(det(seg(0, 10, 0, 0), seg(-6, 2, 6, 2)))
    b = pentagon_from_pair(det(seg(0, 10, 0, 0), seg(6, 2, -6, 2)))
    np.testing.assert_allclose(a.as_array(), b.as_array(), atol=1e-12)


def test_pentagon_mirror():
    flip = lambda p: (-p[0], p[1])
    a = pentagon_from_pair(det(seg(0, 10, 0, 0), seg(-6, 3, 6, 1)))
    b = pentagon_from_pair(det(seg(0, 10, 0, 0), seg(*flip((-6, 3)), *flip((6, 1)))))
    assert b.head == a.head
    assert b.right_wing == pytest.approx(flip(a.left_wing))
    assert b.left_wing == pytest.approx(flip(a.right_wing))
    assert b.bottom_right == pytest.approx(flip(a.bottom_left))
    assert b.bottom_left == pytest.approx(flip(a.bottom_right))


def _on_segment(p, a, b, tol=1e-9):
    p, a, b = map(np.asarray, (p, a, b))
    cross = (b - a)[0] * (p - a)[1] - (b - a)[1] * (p - a)[0]
    t = np.dot(p - a, b - a) / np.dot(b - a, b - a)
    return abs(cross) <= tol * np.dot(b - a, b - a) and -tol <= t <= 1 + tol


def test_pentagon_random_contract(rng):
    for _ in range(100):
        d = random_det(rng)
        p = pentagon_from_pair(d)
        assert is_simple(p.as_array())
        assert math.dist(p.bottom_right, p.bottom_left) == pytest.approx(d.l2.length / 5, abs=1e-9)
        assert _on_segment(d.l1.p1, p.bottom_right, p.bottom_left)
        assert p.head == d.l1.p0


def test_pentagon_errors():
    with pytest.raises(HeadUnresolved):
        pentagon_from_pair(det(seg(0, 10, 0, 0), seg(-6, 2, 6, 2), head=False))
    with pytest.raises(DegeneratePentagon):
        pentagon_from_pair(det(seg(0, 10, 0, 0), seg(0, 2, 0, 8)))
    with pytest.raises(DegeneratePolygon):
        # a wing tip behind the tail folds the outline over itself
        pentagon_from_pair(det(seg(0, 10, 0, 0), seg(7, 3, 0, -5)))


def test_iou_identical_and_offset():
    assert polygon_iou(SQUARE, SQUARE) == pytest.approx(1.0)
    off = [(x + 0.5, y + 0.5) for x, y in SQUARE]
    assert polygon_iou(SQUARE, off) == pytest.approx(0.25 / 1.75, abs=1e-9)


def test_iou_disjoint_and_touching():
    assert polygon_iou(SQUARE, [(x + 3, y) for x, y in SQUARE]) == 0.0
    assert polygon_iou(SQUARE, [(x + 1, y) for x, y in SQUARE]) == 0.0


def test_iou_orientation_independent():
    off = [(x + 0.5, y + 0.5) for x, y in SQUARE]
    assert polygon_iou(SQUARE[::-1], off) == pytest.approx(polygon_iou(SQUARE, off[::-1]), abs=1e-12)


def test_iou_matches_monte_carlo(rng):
    from scipy.spatial import ConvexHull

    for k in range(8):
        pts = [rng.normal(size=(7, 2)) for _ in range(2)]
        pts[1] += rng.uniform(-0.5, 0.5, 2)
        p, q = (x[ConvexHull(x).vertices] for x in pts)
        assert polygon_iou(p, q) == pytest.approx(oracles.monte_carlo_iou(p, q, 400_000, k), abs=0.006)


def test_nonconvex_uses_raster():
    ell = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
    box = [(0, 0), (2, 0), (2, 2), (0, 2)]
    assert not is_convex(ell)
    assert polygon_iou(ell, box) == pytest.approx(0.75, abs=0.01)


def test_clip_area():
    inter = clip_convex(SQUARE, [(0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5)])
    assert abs(signed_area(inter)) == pytest.approx(0.25)


def test_bad_polygons():
    with pytest.raises(DegeneratePolygon):
        polygon_iou([(0, 0), (1, 1)], SQUARE)
    with pytest.raises(DegeneratePolygon):
        polygon_iou([(0, 0), (1, 1), (2, 2)], SQUARE)
    with pytest.raises(DegeneratePolygon):
        polygon_iou([(0, 0), (1, 1), (1, 0), (0, 1)], SQUARE)


def _random_hbb(rng):
    x0, x1 = sorted(rng.uniform(0, 10, 2))
    y0, y1 = sorted(rng.uniform(0, 10, 2))
    return HorizontalBox(x0, y0, x1, y1)


def test_hbb_iou_agrees_with_polygon(rng):
    for _ in range(50):
        a, b = _random_hbb(rng), _random_hbb(rng)
        assert hbb_iou(a, b) == pytest.approx(polygon_iou(a.corners(), b.corners()), abs=1e-12)
        assert form_iou(a, b) == hbb_iou(a, b)
