"""Pair fuselage segments with wing segments and orient the fuselage toward the head."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Sequence

from .decoder import PixelRegion
from .shapes import LineSegment

HEAD_RADIUS_FRACTION = 0.25


@dataclass(frozen=True)
class GroupingConfig:
    midpoint_tol: float = 0.15
    angle_min: float = 60.0
    angle_max: float = 120.0
    extension_tol: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.midpoint_tol <= 0.5:
            raise ValueError("midpoint_tol must lie in [0, 0.5]")
        if not self.angle_min < self.angle_max:
            raise ValueError("angle_min must be < angle_max")
        if self.extension_tol < 0:
            raise ValueError("extension_tol must be >= 0")


@dataclass(frozen=True)
class AircraftDetection:
    l1: LineSegment
    l2: LineSegment
    score: float
    head_resolved: bool = False

    @classmethod
    def from_pair(cls, l1: LineSegment, l2: LineSegment) -> "AircraftDetection":
        return cls(l1, l2, (l1.score + l2.score) / 2.0, False)


class Crossing(NamedTuple):
    s: float  # parameter along l1 (0 at p0, 1 at p1)
    t: float  # parameter along l2
    angle: float  # acute angle between the two lines, degrees


def crossing(l1: LineSegment, l2: LineSegment) -> Optional[Crossing]:
    """Where the supporting lines of ``l1`` and ``l2`` meet; ``None`` if parallel."""
    px, py = l1.p0
    qx, qy = l2.p0
    ax, ay = l1.p1[0] - px, l1.p1[1] - py
    bx, by = l2.p1[0] - qx, l2.p1[1] - qy
    denom = ax * by - ay * bx
    na, nb = math.hypot(ax, ay), math.hypot(bx, by)
    if na == 0 or nb == 0 or abs(denom) <= 1e-12 * na * nb:
        return None
    wx, wy = qx - px, qy - py
    s = (wx * by - wy * bx) / denom
    t = (wx * ay - wy * ax) / denom
    angle = math.degrees(math.atan2(abs(denom), abs(ax * bx + ay * by)))
    return Crossing(s, t, angle)


def _admit(c: Optional[Crossing], cfg: GroupingConfig) -> bool:
    if c is None:
        return False
    ext = cfg.extension_tol
    return (
        -ext <= c.s <= 1.0 + ext
        and 0.0 <= c.t <= 1.0
        and abs(c.t - 0.5) <= cfg.midpoint_tol
        and cfg.angle_min <= c.angle <= cfg.angle_max
    )


def pair_predicate(l1: LineSegment, l2: LineSegment, cfg: GroupingConfig = GroupingConfig()) -> bool:
    """``l1`` (extended slightly) bisects ``l2`` and crosses it at a near-right angle."""
    return _admit(crossing(l1, l2), cfg)


def _pair_quality(c: Crossing) -> float:
    overshoot = max(0.0, -c.s, c.s - 1.0)
    return abs(c.t - 0.5) + overshoot


def pair_segments(segs_a: Sequence[LineSegment], segs_b: Sequence[LineSegment],
                  cfg: GroupingConfig = GroupingConfig()) -> list[AircraftDetection]:
    """Greedy one-to-one pairing over all admissible (fuselage, wing) pairs.

    Pairs are taken by descending mean score; equal scores prefer the pair
    crossing closer to the wing midpoint, then a canonical endpoint order, so
    the result does not depend on the order of the inputs.
    """
    candidates = []
    for i, a in enumerate(segs_a):
        for j, b in enumerate(segs_b):
            c = crossing(a, b)
            if _admit(c, cfg):
                key = (-(a.score + b.score) / 2.0, _pair_quality(c), a.canonical(), b.canonical())
                candidates.append((key, i, j))
    candidates.sort(key=lambda item: item[0])

    used_a, used_b, out = set(), set(), []
    for _, i, j in candidates:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        out.append(AircraftDetection.from_pair(segs_a[i], segs_b[j]))
    return out


def match_head(det: AircraftDetection, head_regions: Sequence[PixelRegion], stride: int) -> AircraftDetection:
    """Orient ``det.l1`` so ``p0`` is the endpoint nearest a detected head blob.

    The blob must lie within a quarter of the fuselage length of that endpoint.
    Exact ties, whether one blob equally near both ends or two blobs equally
    near different ends, keep the current order.
    """
    best = None
    p0, p1 = det.l1.p0, det.l1.p1
    for region in head_regions:
        hx, hy = (region.centroid[0] + 0.5) * stride, (region.centroid[1] + 0.5) * stride
        d0 = math.hypot(hx - p0[0], hy - p0[1])
        d1 = math.hypot(hx - p1[0], hy - p1[1])
        # (distance, 0 if the blob marks p0 else 1): ties go to p0
        key = (d0, 0) if d0 <= d1 else (d1, 1)
        if best is None or key < best:
            best = key
    if best is None or best[0] > HEAD_RADIUS_FRACTION * det.l1.length:
        return replace(det, head_resolved=False)
    l1 = det.l1.reversed() if best[1] else det.l1
    return replace(det, l1=l1, head_resolved=True)
