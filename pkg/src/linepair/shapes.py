"""Small immutable geometric value types used by several modules."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Point = tuple[float, float]


@dataclass(frozen=True)
class LineSegment:
    """A 2-D segment in image pixels, ``p0 -> p1``, with a confidence score."""

    p0: Point
    p1: Point
    score: float = 1.0

    @property
    def length(self) -> float:
        return math.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])

    @property
    def midpoint(self) -> Point:
        return ((self.p0[0] + self.p1[0]) / 2.0, (self.p0[1] + self.p1[1]) / 2.0)

    @property
    def direction(self) -> np.ndarray:
        return np.array([self.p1[0] - self.p0[0], self.p1[1] - self.p0[1]], dtype=float)

    def reversed(self) -> "LineSegment":
        return LineSegment(self.p1, self.p0, self.score)

    def canonical(self) -> tuple[Point, Point]:
        """Endpoints in lexicographic order; independent of p0/p1 orientation."""
        a, b = tuple(self.p0), tuple(self.p1)
        return (a, b) if a <= b else (b, a)

    def to_list(self) -> list[list[float]]:
        return [list(self.p0), list(self.p1)]


@dataclass(frozen=True)
class RotatedBox:
    """Oriented rectangle; ``angle`` in radians CCW from the image x-axis, in [0, pi)."""

    cx: float
    cy: float
    w: float
    h: float
    angle: float

    @property
    def center(self) -> Point:
        return (self.cx, self.cy)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([c, s]), np.array([-s, c])

    def corners(self) -> np.ndarray:
        """4x2 array of corners in counter-clockwise order (in a y-up frame)."""
        u, v = self.axes()
        c = np.array([self.cx, self.cy])
        hw, hh = self.w / 2.0, self.h / 2.0
        return np.array([
            c - hw * u - hh * v,
            c + hw * u - hh * v,
            c + hw * u + hh * v,
            c - hw * u + hh * v,
        ])

    def area(self) -> float:
        return self.w * self.h

    def to_dict(self) -> dict:
        return {"cx": self.cx, "cy": self.cy, "w": self.w, "h": self.h, "angle": self.angle}


def normalize_angle(angle: float) -> float:
    """Map any angle to [0, pi)."""
    a = math.fmod(angle, math.pi)
    if a < 0:
        a += math.pi
    if a >= math.pi:
        a -= math.pi
    return a


@dataclass(frozen=True)
class HorizontalBox:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def area(self) -> float:
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)

    def corners(self) -> np.ndarray:
        return np.array([
            [self.xmin, self.ymin],
            [self.xmax, self.ymin],
            [self.xmax, self.ymax],
            [self.xmin, self.ymax],
        ])

    def to_list(self) -> list[float]:
        return [self.xmin, self.ymin, self.xmax, self.ymax]


@dataclass(frozen=True)
class PentagonMask:
    """Vertices ordered head, right_wing, bottom_right, bottom_left, left_wing."""

    vertices: tuple[Point, Point, Point, Point, Point]

    @property
    def head(self) -> Point:
        return self.vertices[0]

    @property
    def right_wing(self) -> Point:
        return self.vertices[1]

    @property
    def bottom_right(self) -> Point:
        return self.vertices[2]

    @property
    def bottom_left(self) -> Point:
        return self.vertices[3]

    @property
    def left_wing(self) -> Point:
        return self.vertices[4]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    def to_list(self) -> list[list[float]]:
        return [list(v) for v in self.vertices]
