"""Synthetic aircraft scenes used by the self-check and the acceptance tests."""
from __future__ import annotations

import math

import numpy as np

from .annotations import Keypoints5, SceneAnnotation, kp_to_segments
from .errors import DegenerateAircraft


def make_aircraft(center, heading: float, fuselage: float, span: float,
                  wing_at: float = 0.45, wing_angle: float = 90.0, tail_width: float = 0.15) -> Keypoints5:
    """Keypoints of an idealized aircraft.

    ``heading`` is the direction tail -> head (radians), ``wing_at`` the fraction
    of the fuselage from the head where the wings cross it, ``wing_angle`` the
    fuselage/wing angle in degrees.  The wings are bisected by the fuselage.
    """
    h = np.array([math.cos(heading), math.sin(heading)])
    c = np.asarray(center, dtype=float)
    head = c + fuselage / 2.0 * h
    tail = c - fuselage / 2.0 * h
    mid = head - wing_at * fuselage * h
    a = heading + math.radians(wing_angle)
    w = np.array([math.cos(a), math.sin(a)])
    left_wing = mid + span / 2.0 * w
    right_wing = mid - span / 2.0 * w
    n = np.array([-h[1], h[0]])
    if np.dot(n, w) < 0:
        n = -n
    left_tail = tail + tail_width * span / 2.0 * n
    right_tail = tail - tail_width * span / 2.0 * n
    pts = [head, left_wing, left_tail, right_tail, right_wing]
    return Keypoints5(*[(float(p[0]), float(p[1])) for p in pts])


def _seg_dist(p, q, r, s) -> float:
    """Minimum distance between segments pq and rs."""
    p, q, r, s = (np.asarray(v, dtype=float) for v in (p, q, r, s))

    def point_seg(x, a, b):
        ab = b - a
        t = np.clip(np.dot(x - a, ab) / max(np.dot(ab, ab), 1e-300), 0.0, 1.0)
        return float(np.hypot(*(a + t * ab - x)))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    d1, d2 = cross(p, q, r), cross(p, q, s)
    d3, d4 = cross(r, s, p), cross(r, s, q)
    if (d1 > 0) != (d2 > 0) and (d3 > 0) != (d4 > 0) and d1 * d2 * d3 * d4 != 0:
        return 0.0
    return min(point_seg(p, r, s), point_seg(q, r, s), point_seg(r, p, q), point_seg(s, p, q))


def aircraft_separation(a: Keypoints5, b: Keypoints5) -> float:
    """Smallest distance between any segment of ``a`` and any segment of ``b``."""
    sa, sb = kp_to_segments(a), kp_to_segments(b)
    return min(_seg_dist(x.p0, x.p1, y.p0, y.p1) for x in sa for y in sb)


def _inside(kp: Keypoints5, width, height, margin) -> bool:
    return all(margin <= x <= width - margin and margin <= y <= height - margin for x, y in kp.points())


def random_aircraft(rng: np.random.Generator, width: int, height: int, size=(48.0, 112.0),
                    margin: float = 12.0) -> Keypoints5:
    while True:
        fuselage = rng.uniform(*size)
        span = fuselage * rng.uniform(0.85, 1.2)
        kp = make_aircraft(
            center=(rng.uniform(0, width), rng.uniform(0, height)),
            heading=rng.uniform(-math.pi, math.pi),
            fuselage=fuselage,
            span=span,
            wing_at=rng.uniform(0.35, 0.5),
            wing_angle=rng.uniform(75.0, 105.0),
        )
        if _inside(kp, width, height, margin):
            return kp


def random_scene(rng: np.random.Generator, n_aircraft: int, min_sep: float, width: int = 512,
                 height: int = 512, image_id: str = "scene", size=(48.0, 112.0),
                 margin: float = 12.0, max_tries: int = 20000) -> SceneAnnotation:
    """Scene of ``n_aircraft`` keypoint aircraft, pairwise segment distance >= ``min_sep``."""
    placed: list[Keypoints5] = []
    tries = 0
    while len(placed) < n_aircraft:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"could not place {n_aircraft} aircraft with separation {min_sep}")
        kp = random_aircraft(rng, width, height, size, margin)
        if all(aircraft_separation(kp, other) >= min_sep for other in placed):
            placed.append(kp)
    return SceneAnnotation(image_id, height, width, tuple(placed), "kp")


def adhesion_pair(rng: np.random.Generator, stride: int, width: int = 512, height: int = 512,
                  span=(88.0, 140.0), oblique=(20.0, 70.0)):
    """Two aircraft whose wing tips fall in edge-adjacent heatmap cells.

    The wings are collinear-ish and oblique (``oblique`` degrees from the grid
    axes), so the blob they form in the endpoint channel is two cells long.
    Returns the two :class:`Keypoints5`.
    """
    rows, cols = -(-height // stride), -(-width // stride)
    for _ in range(10000):
        theta = math.radians(rng.uniform(*oblique)) + rng.integers(4) * math.pi / 2
        w = np.array([math.cos(theta), math.sin(theta)])
        ls = rng.uniform(*span)
        if abs(w[0]) >= abs(w[1]):
            step = np.array([1 if w[0] > 0 else -1, 0])
        else:
            step = np.array([0, 1 if w[1] > 0 else -1])
        cell1 = np.array([rng.integers(cols), rng.integers(rows)])
        cell2 = cell1 + step
        tip1 = (cell1 + 0.5) * stride
        tip2 = (cell2 + 0.5) * stride
        mids = (tip1 - ls / 2.0 * w, tip2 + ls / 2.0 * w)
        kps = []
        for mid in mids:
            fuselage = ls * rng.uniform(0.8, 1.1)
            wing_at = rng.uniform(0.35, 0.5)
            sign = 1 if rng.random() < 0.5 else -1
            heading = theta + sign * math.pi / 2
            hvec = np.array([math.cos(heading), math.sin(heading)])
            center = mid + (wing_at - 0.5) * fuselage * hvec
            kps.append(make_aircraft(center, heading, fuselage, ls, wing_at, 90.0))
        if not all(_inside(kp, width, height, 2 * stride) for kp in kps):
            continue
        tips = [p for kp in kps for p in (kp.left_wing, kp.right_wing)]
        cells = {tuple(np.floor(np.asarray(t) / stride).astype(int)) for t in tips}
        if tuple(cell1) in cells and tuple(cell2) in cells:
            return kps[0], kps[1]
    raise RuntimeError("could not construct an adhesion pair")


def adhesion_scene(rng: np.random.Generator, stride: int = 4, n_extra: int = 1, width: int = 512,
                   height: int = 512, image_id: str = "adhesion", extra_sep: float | None = None) -> SceneAnnotation:
    """One wingtip-adjacent pair plus ``n_extra`` well separated aircraft."""
    a, b = adhesion_pair(rng, stride, width, height)
    placed = [a, b]
    sep = extra_sep if extra_sep is not None else 6.0 * stride
    tries = 0
    while len(placed) < 2 + n_extra:
        tries += 1
        if tries > 20000:
            raise RuntimeError("could not place extra aircraft")
        try:
            kp = random_aircraft(rng, width, height)
        except DegenerateAircraft:
            continue
        if all(aircraft_separation(kp, other) >= sep for other in placed):
            placed.append(kp)
    return SceneAnnotation(image_id, height, width, tuple(placed), "kp")
