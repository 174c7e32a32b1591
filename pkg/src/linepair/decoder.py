"""Heatmap -> binary mask -> 4-connected regions -> line segments / point regions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import _kernels
from .errors import RegionTooSmall, ShapeMismatch
from .heatmap import Heatmap
from .shapes import LineSegment

DEFAULT_TAU = 0.3
_ISOTROPIC_EPS = 1e-9


@dataclass
class BinaryMask:
    bits: np.ndarray
    threshold_used: float

    @property
    def shape(self):
        return self.bits.shape


@dataclass
class PixelRegion:
    """One 4-connected region; coordinates are in cells, ``(col, row)``."""

    cols: np.ndarray
    rows: np.ndarray
    centroid: tuple[float, float]
    mean_score: float
    stride: int = 1

    @property
    def area(self) -> int:
        return int(self.cols.size)

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        """``(min_col, min_row, max_col, max_row)``, inclusive."""
        return (int(self.cols.min()), int(self.rows.min()), int(self.cols.max()), int(self.rows.max()))

    @property
    def bbox_hw(self) -> tuple[int, int]:
        """Inclusive extent ``(height, width)`` of the bounding rectangle."""
        c0, r0, c1, r1 = self.bbox
        return (r1 - r0 + 1, c1 - c0 + 1)

    @property
    def bbox_center(self) -> tuple[float, float]:
        c0, r0, c1, r1 = self.bbox
        return ((c0 + c1) / 2.0, (r0 + r1) / 2.0)

    @property
    def pixels(self) -> set[tuple[int, int]]:
        return set(zip(self.cols.tolist(), self.rows.tolist()))

    def centroid_px(self) -> tuple[float, float]:
        return ((self.centroid[0] + 0.5) * self.stride, (self.centroid[1] + 0.5) * self.stride)


def binarize(hm: Heatmap, tau: float = DEFAULT_TAU) -> BinaryMask:
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    return BinaryMask(hm.values >= tau, tau)


def connected_components(mask: BinaryMask, src: Heatmap) -> list[PixelRegion]:
    """Maximal 4-connected regions of ``mask`` sorted by (min row, min col)."""
    if mask.shape != src.shape:
        raise ShapeMismatch(f"mask {mask.shape} vs heatmap {src.shape}")
    labels, n = _kernels.label4(mask.bits)
    if n == 0:
        return []
    rr, cc = np.nonzero(labels)
    lab = labels[rr, cc]
    order = np.argsort(lab, kind="stable")
    rr, cc, lab = rr[order], cc[order], lab[order]
    splits = np.searchsorted(lab, np.arange(2, n + 1))
    idx = np.arange(1, n + 1)
    means = np.asarray(ndimage.mean(src.values, labels, idx))

    regions = []
    for k, (rows, cols) in enumerate(zip(np.split(rr, splits), np.split(cc, splits))):
        regions.append(PixelRegion(
            cols=cols, rows=rows,
            centroid=(float(cols.mean()), float(rows.mean())),
            mean_score=float(min(max(means[k], 0.0), 1.0)),
            stride=src.stride,
        ))
    regions.sort(key=lambda r: (r.bbox[1], r.bbox[0]))
    return regions


def principal_axis(cols: np.ndarray, rows: np.ndarray) -> tuple[float, float, float]:
    """Centroid and major-axis angle from second central moments."""
    x = cols.astype(np.float64)
    y = rows.astype(np.float64)
    cx, cy = x.mean(), y.mean()
    dx, dy = x - cx, y - cy
    mu20 = float(np.mean(dx * dx))
    mu02 = float(np.mean(dy * dy))
    mu11 = float(np.mean(dx * dy))
    if abs(mu20 - mu02) < _ISOTROPIC_EPS and abs(mu11) < _ISOTROPIC_EPS:
        return cx, cy, 0.0
    return cx, cy, 0.5 * math.atan2(2.0 * mu11, mu20 - mu02)


def fit_segment(region: PixelRegion) -> LineSegment:
    """Long axis of the region's moment ellipse, clipped to the region's extent.

    Endpoints are the extreme projections of the region's cells onto the axis
    through the centroid, mapped to pixel centres.
    """
    if region.area < 2:
        raise RegionTooSmall(f"region of area {region.area} cannot define a segment")
    cx, cy, theta = principal_axis(region.cols, region.rows)
    ux, uy = math.cos(theta), math.sin(theta)
    proj = (region.cols - cx) * ux + (region.rows - cy) * uy
    lo, hi = float(proj.min()), float(proj.max())
    s = region.stride
    p0 = ((cx + lo * ux + 0.5) * s, (cy + lo * uy + 0.5) * s)
    p1 = ((cx + hi * ux + 0.5) * s, (cy + hi * uy + 0.5) * s)
    return LineSegment(p0, p1, region.mean_score)


def extract_segments(hm: Heatmap, tau: float = DEFAULT_TAU) -> list[LineSegment]:
    """Binarize, label and fit every region with at least two cells."""
    regions = connected_components(binarize(hm, tau), hm)
    return [fit_segment(r) for r in regions if r.area >= 2]


def extract_points(hm: Heatmap, tau: float = DEFAULT_TAU) -> list[PixelRegion]:
    return connected_components(binarize(hm, tau), hm)
