"""Ground-truth annotation records and their conversion to line-segment pairs.

Two record kinds are supported, one JSON object per line::

    {"image_id": "a", "height": 512, "width": 512,
     "aircraft_kp": [{"head": [x, y], "left_wing": [x, y], "left_tail": [x, y],
                      "right_tail": [x, y], "right_wing": [x, y]}]}

    {"image_id": "b", "height": 512, "width": 512,
     "aircraft_rbox": [{"cx": 10.0, "cy": 20.0, "w": 30.0, "h": 8.0, "angle": 0.3}]}

Coordinates are ``(x, y)`` with the origin at the top-left corner and y pointing down.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import DegenerateAircraft, MalformedRecord, OutOfBounds
from .shapes import LineSegment, Point, RotatedBox, normalize_angle

KP_FIELDS = ("head", "left_wing", "left_tail", "right_tail", "right_wing")

_BOUNDS_EPS = 1e-9


def _midpoint(a: Point, b: Point) -> Point:
    return ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)


@dataclass(frozen=True)
class Keypoints5:
    """Five aircraft keypoints, listed anti-clockwise starting at the head."""

    head: Point
    left_wing: Point
    left_tail: Point
    right_tail: Point
    right_wing: Point

    def __post_init__(self):
        for name in KP_FIELDS:
            x, y = getattr(self, name)
            if not (math.isfinite(x) and math.isfinite(y)):
                raise DegenerateAircraft(f"non-finite {name} coordinate")
        if tuple(self.left_wing) == tuple(self.right_wing):
            raise DegenerateAircraft("left_wing equals right_wing")
        if tuple(self.head) == self.tail:
            raise DegenerateAircraft("head coincides with tail midpoint")

    @property
    def tail(self) -> Point:
        return _midpoint(self.left_tail, self.right_tail)

    def points(self) -> list[Point]:
        return [getattr(self, name) for name in KP_FIELDS]

    def to_dict(self) -> dict:
        return {name: list(getattr(self, name)) for name in KP_FIELDS}


Aircraft = Union[Keypoints5, RotatedBox]


@dataclass(frozen=True)
class SceneAnnotation:
    image_id: str
    height: int
    width: int
    aircraft: tuple[Aircraft, ...] = ()
    kind: str = "kp"

    @property
    def image_size(self) -> tuple[int, int]:
        return (self.height, self.width)

    def segment_pairs(self) -> list[tuple[LineSegment, LineSegment]]:
        return [to_segments(a) for a in self.aircraft]

    def shifted(self, dx: float, dy: float) -> "SceneAnnotation":
        """Copy with every aircraft translated by ``(dx, dy)`` pixels."""
        moved = []
        for a in self.aircraft:
            if isinstance(a, Keypoints5):
                moved.append(Keypoints5(*[(p[0] + dx, p[1] + dy) for p in a.points()]))
            else:
                moved.append(RotatedBox(a.cx + dx, a.cy + dy, a.w, a.h, a.angle))
        return SceneAnnotation(self.image_id, self.height, self.width, tuple(moved), self.kind)


def kp_to_segments(kp: Keypoints5) -> tuple[LineSegment, LineSegment]:
    """Fuselage (head -> tail midpoint) and wing (left -> right) segments."""
    l1 = LineSegment(tuple(kp.head), kp.tail)
    l2 = LineSegment(tuple(kp.left_wing), tuple(kp.right_wing))
    if l1.length == 0 or l2.length == 0:
        raise DegenerateAircraft("zero-length segment")
    return l1, l2


def _ordered(a: Point, b: Point) -> LineSegment:
    return LineSegment(a, b) if a <= b else LineSegment(b, a)


def rbox_to_segments(box: RotatedBox) -> tuple[LineSegment, LineSegment]:
    """Median lines of a rotated box: ``L1`` along the longer side, ``L2`` along the shorter.

    A rotated box carries no heading, so both segments come back with their
    endpoints in lexicographic order.
    """
    u, v = box.axes()
    c = (box.cx, box.cy)
    if box.w >= box.h:
        long_axis, long_len, short_axis, short_len = u, box.w, v, box.h
    else:
        long_axis, long_len, short_axis, short_len = v, box.h, u, box.w

    def median(axis, length):
        a = (c[0] - axis[0] * length / 2.0, c[1] - axis[1] * length / 2.0)
        b = (c[0] + axis[0] * length / 2.0, c[1] + axis[1] * length / 2.0)
        return _ordered(a, b)

    return median(long_axis, long_len), median(short_axis, short_len)


def to_segments(aircraft: Aircraft) -> tuple[LineSegment, LineSegment]:
    if isinstance(aircraft, Keypoints5):
        return kp_to_segments(aircraft)
    return rbox_to_segments(aircraft)


def gt_pentagon(kp: Keypoints5):
    """Pentagonal mask built from annotated keypoints (head known)."""
    from .geometry import pentagon_from_pair
    from .grouping import AircraftDetection

    l1, l2 = kp_to_segments(kp)
    det = AircraftDetection(l1=l1, l2=l2, score=1.0, head_resolved=True)
    return pentagon_from_pair(det)


# -- parsing -----------------------------------------------------------------

def _point(value, field, index) -> Point:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise MalformedRecord(f"{field} must be an [x, y] pair", index)
    try:
        x, y = float(value[0]), float(value[1])
    except (TypeError, ValueError):
        raise MalformedRecord(f"{field} has non-numeric coordinates", index) from None
    return (x, y)


def _number(obj, key, index) -> float:
    if key not in obj:
        raise MalformedRecord(f"missing field {key!r}", index)
    try:
        return float(obj[key])
    except (TypeError, ValueError):
        raise MalformedRecord(f"field {key!r} is not a number", index) from None


def _check_inside(points: Iterable[Point], width: int, height: int, index, what: str):
    for x, y in points:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise MalformedRecord(f"{what} has non-finite coordinates", index)
        if x < -_BOUNDS_EPS or y < -_BOUNDS_EPS or x > width + _BOUNDS_EPS or y > height + _BOUNDS_EPS:
            raise OutOfBounds(f"{what} point ({x:g}, {y:g}) outside {width}x{height} image", index)


def _parse_kp(obj, index, width, height) -> Keypoints5:
    if not isinstance(obj, dict):
        raise MalformedRecord("aircraft_kp entries must be objects", index)
    pts = []
    for name in KP_FIELDS:
        if name not in obj:
            raise MalformedRecord(f"missing keypoint {name!r}", index)
        pts.append(_point(obj[name], name, index))
    _check_inside(pts, width, height, index, "keypoint")
    try:
        return Keypoints5(*pts)
    except DegenerateAircraft as exc:
        raise DegenerateAircraft(str(exc), index) from None


def _parse_rbox(obj, index, width, height) -> RotatedBox:
    if not isinstance(obj, dict):
        raise MalformedRecord("aircraft_rbox entries must be objects", index)
    cx, cy, w, h, angle = (_number(obj, k, index) for k in ("cx", "cy", "w", "h", "angle"))
    if not all(math.isfinite(v) for v in (cx, cy, w, h, angle)):
        raise MalformedRecord("non-finite rotated box field", index)
    if w <= 0 or h <= 0:
        raise DegenerateAircraft("rotated box needs positive width and height", index)
    box = RotatedBox(cx, cy, w, h, normalize_angle(angle))
    _check_inside(map(tuple, box.corners()), width, height, index, "box corner")
    return box


def parse_scene(text: str, index: int | None = None) -> SceneAnnotation:
    """Parse and validate one JSON-lines annotation record."""
    try:
        rec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"bad JSON ({exc.msg})", index) from None
    if not isinstance(rec, dict):
        raise MalformedRecord("record must be a JSON object", index)
    for key in ("image_id", "height", "width"):
        if key not in rec:
            raise MalformedRecord(f"missing field {key!r}", index)
    image_id = rec["image_id"]
    if not isinstance(image_id, str):
        raise MalformedRecord("image_id must be a string", index)
    height, width = rec["height"], rec["width"]
    if not (isinstance(height, int) and isinstance(width, int)) or height <= 0 or width <= 0:
        raise MalformedRecord("height and width must be positive integers", index)

    kinds = [k for k in ("aircraft_kp", "aircraft_rbox") if k in rec]
    if len(kinds) != 1:
        raise MalformedRecord("record must declare exactly one of aircraft_kp / aircraft_rbox", index)
    entries = rec[kinds[0]]
    if not isinstance(entries, list):
        raise MalformedRecord(f"{kinds[0]} must be a list", index)

    if kinds[0] == "aircraft_kp":
        aircraft = tuple(_parse_kp(e, index, width, height) for e in entries)
        kind = "kp"
    else:
        aircraft = tuple(_parse_rbox(e, index, width, height) for e in entries)
        kind = "rbox"
    return SceneAnnotation(image_id, height, width, aircraft, kind)


def parse_file(text: str) -> list[SceneAnnotation]:
    """Parse a whole JSON-lines file; blank lines are skipped."""
    scenes = []
    for i, line in enumerate(text.splitlines()):
        if line.strip():
            scenes.append(parse_scene(line, index=i))
    return scenes


def read_annotations(path) -> list[SceneAnnotation]:
    with open(path, encoding="utf-8") as fh:
        return parse_file(fh.read())


def serialize_scene(scene: SceneAnnotation) -> str:
    rec = {"image_id": scene.image_id, "height": scene.height, "width": scene.width}
    if scene.kind == "kp":
        rec["aircraft_kp"] = [a.to_dict() for a in scene.aircraft]
    else:
        rec["aircraft_rbox"] = [a.to_dict() for a in scene.aircraft]
    return json.dumps(rec)


def serialize_file(scenes: Iterable[SceneAnnotation]) -> str:
    return "".join(serialize_scene(s) + "\n" for s in scenes)
