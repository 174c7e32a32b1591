"""Output forms for a paired detection, and overlap measures between them."""
from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateBox, DegeneratePentagon, DegeneratePolygon, HeadUnresolved
from .grouping import AircraftDetection
from .shapes import HorizontalBox, PentagonMask, RotatedBox, normalize_angle

RASTER_RES = 512
_AREA_EPS = 1e-12


def _endpoints(det: AircraftDetection) -> np.ndarray:
    return np.array([det.l1.p0, det.l1.p1, det.l2.p0, det.l2.p1], dtype=float)


def hbb_from_pair(det: AircraftDetection) -> HorizontalBox:
    pts = _endpoints(det)
    xmin, ymin = pts.min(axis=0)
    xmax, ymax = pts.max(axis=0)
    if not (xmin < xmax and ymin < ymax):
        raise DegenerateBox("segment endpoints span zero width or height")
    return HorizontalBox(float(xmin), float(ymin), float(xmax), float(ymax))


def rbb_from_pair(det: AircraftDetection) -> RotatedBox:
    """Smallest fuselage-aligned rectangle holding all four segment endpoints."""
    d = det.l1.direction
    norm = math.hypot(d[0], d[1])
    if norm == 0:
        raise DegenerateBox("zero-length fuselage segment")
    u = d / norm
    n = np.array([-u[1], u[0]])
    pts = _endpoints(det)
    pu, pn = pts @ u, pts @ n
    w = float(pu.max() - pu.min())
    h = float(pn.max() - pn.min())
    if w <= 0 or h <= 0:
        raise DegenerateBox("rotated box has zero extent")
    c = (pu.max() + pu.min()) / 2.0 * u + (pn.max() + pn.min()) / 2.0 * n
    return RotatedBox(float(c[0]), float(c[1]), w, h, normalize_angle(math.atan2(u[1], u[0])))


def pentagon_from_pair(det: AircraftDetection) -> PentagonMask:
    """Head, both wing tips, and a short tail edge parallel to the wings.

    The tail edge is centred on the fuselage's tail end and is one fifth as long
    as the wing segment.  Which wing tip is "right" follows the sign of the
    cross product with the head -> tail direction.
    """
    if not det.head_resolved:
        raise HeadUnresolved("pentagon needs a resolved head")
    head = np.asarray(det.l1.p0, dtype=float)
    tail = np.asarray(det.l1.p1, dtype=float)
    w0 = np.asarray(det.l2.p0, dtype=float)
    w1 = np.asarray(det.l2.p1, dtype=float)
    fwd = tail - head
    span = w1 - w0
    side = fwd[0] * span[1] - fwd[1] * span[0]
    if side == 0:
        raise DegeneratePentagon("wing segment is parallel to the fuselage")
    right, left = (w1, w0) if side > 0 else (w0, w1)
    l2_len = float(np.hypot(*span))
    u = (right - left) / l2_len
    half = l2_len / 10.0
    verts = np.array([head, right, tail + half * u, tail - half * u, left])
    if abs(signed_area(verts)) <= _AREA_EPS or not is_simple(verts):
        raise DegeneratePentagon("pentagon is degenerate or self-intersecting")
    return PentagonMask(tuple((float(x), float(y)) for x, y in verts))


# -- polygons ----------------------------------------------------------------

def signed_area(poly) -> float:
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segments_touch(a, b, c, d) -> bool:
    o1, o2, o3, o4 = _orient(a, b, c), _orient(a, b, d), _orient(c, d, a), _orient(c, d, b)
    if ((o1 > 0) != (o2 > 0)) and ((o3 > 0) != (o4 > 0)) and o1 and o2 and o3 and o4:
        return True

    def on_seg(p, q, r, o):
        return o == 0 and min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])

    return on_seg(a, b, c, o1) or on_seg(a, b, d, o2) or on_seg(c, d, a, o3) or on_seg(c, d, b, o4)


def is_simple(poly) -> bool:
    """No two non-adjacent edges meet (and adjacent edges do not fold back)."""
    p = [tuple(v) for v in np.asarray(poly, dtype=float)]
    n = len(p)
    if n < 3:
        return False
    edges = [(p[i], p[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent:
                # shared vertex only; reject collinear overlap
                a, b = edges[i]
                c, d = edges[j]
                shared = b if j == i + 1 else a
                other_i = a if shared == b else b
                other_j = d if shared == c else c
                if _orient(shared, other_i, other_j) == 0:
                    vi = (other_i[0] - shared[0], other_i[1] - shared[1])
                    vj = (other_j[0] - shared[0], other_j[1] - shared[1])
                    if vi[0] * vj[0] + vi[1] * vj[1] > 0:
                        return False
                continue
            if _segments_touch(*edges[i], *edges[j]):
                return False
    return True


def is_convex(poly) -> bool:
    p = np.asarray(poly, dtype=float)
    e = np.roll(p, -1, axis=0) - p
    cross = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
    return bool(np.all(cross >= -_AREA_EPS) or np.all(cross <= _AREA_EPS))


def _ccw(poly) -> np.ndarray:
    p = np.asarray(poly, dtype=float)
    return p if signed_area(p) > 0 else p[::-1].copy()


def clip_convex(subject, clipper) -> np.ndarray:
    """Sutherland-Hodgman: part of ``subject`` inside convex ``clipper`` (both CCW)."""
    out = [tuple(v) for v in subject]
    m = len(clipper)
    for k in range(m):
        if not out:
            break
        a = clipper[k]
        b = clipper[(k + 1) % m]
        ex, ey = b[0] - a[0], b[1] - a[1]

        def side(p):
            return ex * (p[1] - a[1]) - ey * (p[0] - a[0])

        inp, out = out, []
        s = inp[-1]
        ss = side(s)
        for e in inp:
            es = side(e)
            if es >= 0:
                if ss < 0:
                    out.append(_cut(s, e, ss, es))
                out.append(e)
            elif ss >= 0:
                out.append(_cut(s, e, ss, es))
            s, ss = e, es
    return np.asarray(out, dtype=float).reshape(-1, 2)


def _cut(s, e, ss, es):
    t = ss / (ss - es)
    return (s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1]))


def points_in_polygon(points: np.ndarray, poly) -> np.ndarray:
    """Even-odd rule membership for an ``(n, 2)`` array of points."""
    p = np.asarray(poly, dtype=float)
    x, y = points[:, 0], points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    for (x0, y0), (x1, y1) in zip(p, np.roll(p, -1, axis=0)):
        crosses = (y0 > y) != (y1 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
        inside ^= crosses & (x < xint)
    return inside


def _check_polygon(poly) -> np.ndarray:
    p = np.asarray(poly, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2 or len(p) < 3 or not np.all(np.isfinite(p)):
        raise DegeneratePolygon("polygon needs at least three finite vertices")
    if abs(signed_area(p)) <= _AREA_EPS:
        raise DegeneratePolygon("polygon has zero area")
    return p


def _raster_iou(p: np.ndarray, q: np.ndarray, res: int = RASTER_RES) -> float:
    lo = np.minimum(p.min(axis=0), q.min(axis=0))
    hi = np.maximum(p.max(axis=0), q.max(axis=0))
    xs = lo[0] + (np.arange(res) + 0.5) * (hi[0] - lo[0]) / res
    ys = lo[1] + (np.arange(res) + 0.5) * (hi[1] - lo[1]) / res
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    a = points_in_polygon(pts, p)
    b = points_in_polygon(pts, q)
    union = np.count_nonzero(a | b)
    return float(np.count_nonzero(a & b) / union) if union else 0.0


def polygon_iou(p, q) -> float:
    """Intersection over union of two simple polygons.

    Convex pairs are clipped exactly; anything else is estimated on a
    ``RASTER_RES x RASTER_RES`` sample grid over the joint bounding box.
    """
    p = _check_polygon(p)
    q = _check_polygon(q)
    pmin, pmax = p.min(axis=0), p.max(axis=0)
    qmin, qmax = q.min(axis=0), q.max(axis=0)
    if np.any(pmax < qmin) or np.any(qmax < pmin):
        return 0.0
    if not (is_convex(p) and is_convex(q)):
        return _raster_iou(p, q)
    pc, qc = _ccw(p), _ccw(q)
    inter_poly = clip_convex(pc, qc)
    inter = abs(signed_area(inter_poly)) if len(inter_poly) >= 3 else 0.0
    area_p, area_q = abs(signed_area(pc)), abs(signed_area(qc))
    union = area_p + area_q - inter
    return float(min(max(inter / union, 0.0), 1.0))


def hbb_iou(a: HorizontalBox, b: HorizontalBox) -> float:
    iw = min(a.xmax, b.xmax) - max(a.xmin, b.xmin)
    ih = min(a.ymax, b.ymax) - max(a.ymin, b.ymin)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area() + b.area() - inter)


def form_iou(a, b) -> float:
    """IoU for two shapes of the same output form."""
    if isinstance(a, HorizontalBox) and isinstance(b, HorizontalBox):
        return hbb_iou(a, b)
    return polygon_iou(_as_polygon(a), _as_polygon(b))


def _as_polygon(shape) -> np.ndarray:
    if isinstance(shape, (RotatedBox, HorizontalBox)):
        return shape.corners()
    if isinstance(shape, PentagonMask):
        return shape.as_array()
    return np.asarray(shape, dtype=float)
