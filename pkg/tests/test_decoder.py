import math

import numpy as np
import pytest

from linepair import oracles
from linepair.decoder import (BinaryMask, PixelRegion, binarize, connected_components, extract_points,
                              extract_segments, fit_segment, principal_axis)
from linepair.errors import RegionTooSmall, ShapeMismatch
from linepair.heatmap import Channel, Heatmap, SimulationConfig, simulate_prediction


def hm(values, stride=1, ch=Channel.A_fuselage):
    return Heatmap(np.asarray(values, dtype=float), stride, ch)


def regions_of(bits, stride=1):
    bits = np.asarray(bits, dtype=bool)
    return connected_components(BinaryMask(bits, 0.5), hm(bits.astype(float), stride))


def test_binarize_example():
    m = binarize(hm([[0.9, 0.2], [0.31, 0.29]]), 0.3)
    assert m.bits.astype(int).tolist() == [[1, 0], [1, 0]]
    assert m.threshold_used == 0.3


def test_binarize_threshold_is_inclusive_and_checked():
    assert binarize(hm([[0.3]]), 0.3).bits[0, 0]
    with pytest.raises(ValueError):
        binarize(hm([[0.3]]), 1.0)


def test_binarize_zero_and_count(rng):
    assert not binarize(hm(np.zeros((4, 4)))).bits.any()
    v = rng.random((30, 30))
    assert int(binarize(hm(v), 0.3).bits.sum()) == sum(1 for x in v.ravel() if x >= 0.3)


def test_diagonal_bits_are_two_regions():
    assert len(regions_of([[1, 0], [0, 1]])) == 2


def test_full_block():
    bits = np.zeros((5, 5), bool)
    bits[1:4, 1:4] = True
    (r,) = regions_of(bits)
    assert r.area == 9 and r.centroid == (2.0, 2.0)
    assert r.bbox == (1, 1, 3, 3) and r.bbox_hw == (3, 3)


def test_regions_match_flood_fill(rng):
    for _ in range(30):
        bits = rng.random((32, 32)) < rng.uniform(0.2, 0.7)
        got = {frozenset(r.pixels) for r in regions_of(bits)}
        assert got == set(oracles.flood_fill_regions(bits))


def test_region_invariants(rng):
    v = rng.random((20, 20))
    for r in connected_components(binarize(hm(v), 0.5), hm(v)):
        c0, r0, c1, r1 = r.bbox
        assert c0 <= r.centroid[0] <= c1 and r0 <= r.centroid[1] <= r1
        assert 0.0 <= r.mean_score <= 1.0
        assert r.mean_score == pytest.approx(np.mean([v[y, x] for x, y in r.pixels]))


def test_region_order_is_raster():
    bits = np.zeros((6, 6), bool)
    bits[4, 0] = bits[0, 5] = bits[0, 2] = True
    assert [r.bbox[:2] for r in regions_of(bits)] == [(2, 0), (5, 0), (0, 4)]


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        connected_components(BinaryMask(np.zeros((2, 2), bool), 0.5), hm(np.zeros((3, 3))))


def test_horizontal_run():
    v = np.zeros((8, 12))
    v[5, 2:10] = 1.0
    (s,) = extract_segments(hm(v))
    assert s.p0 == pytest.approx((2.5, 5.5)) and s.p1 == pytest.approx((9.5, 5.5))
    assert s.score == 1.0


def test_rectangle_segment_length_and_axis():
    bits = np.zeros((10, 16), bool)
    bits[3:5, 2:12] = True
    (r,) = regions_of(bits)
    s = fit_segment(r)
    cx, cy, axis = oracles.covariance_axis(r.pixels)
    assert s.length == pytest.approx(9.0, abs=1e-12)
    assert abs(axis[0]) == pytest.approx(1.0)
    assert s.midpoint == pytest.approx((cx + 0.5, cy + 0.5))


def test_axis_matches_covariance_oracle(rng):
    for _ in range(30):
        bits = rng.random((12, 12)) < 0.5
        for r in regions_of(bits):
            if r.area < 3:
                continue
            _, _, theta = principal_axis(r.cols, r.rows)
            _, _, axis = oracles.covariance_axis(r.pixels)
            vals = np.linalg.eigvalsh(np.cov(np.array(sorted(r.pixels), float).T, bias=True))
            if vals[1] - vals[0] < 1e-9:
                continue
            assert abs(abs(math.cos(theta) * axis[0] + math.sin(theta) * axis[1]) - 1) < 1e-9


def test_rotation_equivariance(rng):
    size = 20
    for _ in range(40):
        bits = np.zeros((size, size), bool)
        r0, c0 = rng.integers(2, 14, 2)
        bits[r0:r0 + rng.integers(2, 6), c0:c0 + rng.integers(1, 6)] = True
        bits &= rng.random(bits.shape) < 0.9
        for region in regions_of(bits):
            mu = np.cov(np.array([region.cols, region.rows], float), bias=True) if region.area > 1 else None
            if region.area < 2 or abs(mu[0, 0] - mu[1, 1]) < 1e-6 and abs(mu[0, 1]) < 1e-6:
                continue
            s = fit_segment(region)
            # 90 degree grid rotation: cell (c, r) -> (size-1-r, c); centres (x, y) -> (size - y, x)
            rot = np.zeros_like(bits)
            rot[region.cols, size - 1 - region.rows] = True
            (r2,) = regions_of(rot)
            s2 = fit_segment(r2)
            want = {(round(size - y, 9), round(x, 9)) for x, y in (s.p0, s.p1)}
            got = {(round(x, 9), round(y, 9)) for x, y in (s2.p0, s2.p1)}
            assert got == want


def test_single_cell_region_rejected():
    (r,) = regions_of([[1]])
    with pytest.raises(RegionTooSmall):
        fit_segment(r)
    assert extract_segments(hm([[1.0, 0.0], [0.0, 0.0]])) == []


def test_head_blobs():
    v = np.zeros((20, 20))
    for c, r in [(2, 2), (10, 5), (15, 15)]:
        v[r, c] = 1.0
    assert len(extract_points(hm(v, ch=Channel.D_head))) == 3
    assert extract_points(hm(np.zeros((5, 5)))) == []


def test_blurred_endpoint_centroid():
    v = np.zeros((30, 30))
    v[12, 17] = 1.0
    sim = simulate_prediction(hm(v, 4, Channel.C_endpoints), SimulationConfig(1.5, 0.0, 0))
    (r,) = extract_points(sim, 0.3)
    assert math.hypot(r.centroid[0] - 17, r.centroid[1] - 12) <= 0.5
    assert r.centroid_px() == pytest.approx(((r.centroid[0] + 0.5) * 4, (r.centroid[1] + 0.5) * 4))
