"""Detect merged endpoint blobs in the endpoint heatmap and cut the segment heatmaps there."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .decoder import PixelRegion
from .errors import ShapeMismatch
from .heatmap import Heatmap


class CutPolicy(str, enum.Enum):
    # A blob is an adhesion when it breaks either size condition.
    prose_any_violation = "prose_any_violation"
    # A blob is an adhesion only when it breaks both size conditions.
    pseudocode_both_violations = "pseudocode_both_violations"


@dataclass(frozen=True)
class CutlineConfig:
    area_thresh: float = 100.0
    ratio_thresh: float = 1.5
    cut_len: int = 10
    policy: CutPolicy = CutPolicy.prose_any_violation

    def __post_init__(self):
        if not self.area_thresh > 0:
            raise ValueError("area_thresh must be > 0")
        if not self.ratio_thresh >= 1:
            raise ValueError("ratio_thresh must be >= 1")
        if int(self.cut_len) != self.cut_len or self.cut_len < 1:
            raise ValueError("cut_len must be a positive integer")
        object.__setattr__(self, "policy", CutPolicy(self.policy))


def is_adhesion(height: int, width: int, cfg: CutlineConfig) -> bool:
    """Classify an endpoint blob from its bounding-rectangle extent (in cells)."""
    big = height * width >= cfg.area_thresh
    elongated = max(height, width) / min(height, width) >= cfg.ratio_thresh
    if cfg.policy is CutPolicy.prose_any_violation:
        return big or elongated
    return big and elongated


def detect_adhesions(regions: list[PixelRegion], cfg: CutlineConfig = CutlineConfig()) -> list[tuple[float, float]]:
    """Bounding-rectangle centres ``(col, row)`` of every region classified as an adhesion."""
    centers = []
    for region in regions:
        h, w = region.bbox_hw
        if is_adhesion(h, w, cfg):
            centers.append(region.bbox_center)
    return centers


def cross_cells(center, k: int, shape) -> tuple[np.ndarray, np.ndarray]:
    """Rows and cols of the clipped axis-aligned cross of half-length ``k // 2``."""
    rows, cols = shape
    pc = int(math.floor(center[0] + 0.5))
    pr = int(math.floor(center[1] + 0.5))
    half = k // 2
    hc = np.arange(max(pc - half, 0), min(pc + half, cols - 1) + 1)
    vr = np.arange(max(pr - half, 0), min(pr + half, rows - 1) + 1)
    rr, cc = [], []
    if 0 <= pr < rows:
        rr.append(np.full(hc.size, pr))
        cc.append(hc)
    if 0 <= pc < cols:
        rr.append(vr)
        cc.append(np.full(vr.size, pc))
    if not rr:
        return np.empty(0, dtype=int), np.empty(0, dtype=int)
    return np.concatenate(rr), np.concatenate(cc)


def apply_cuts(hm_a: Heatmap, hm_b: Heatmap, centers, cfg: CutlineConfig = CutlineConfig()) -> tuple[Heatmap, Heatmap]:
    """Zero a horizontal and a vertical run of ``cut_len + 1`` cells at each centre in both maps."""
    if hm_a.shape != hm_b.shape:
        raise ShapeMismatch(f"heatmap A {hm_a.shape} vs heatmap B {hm_b.shape}")
    a = hm_a.values.copy()
    b = hm_b.values.copy()
    for center in centers:
        rr, cc = cross_cells(center, cfg.cut_len, a.shape)
        a[rr, cc] = 0.0
        b[rr, cc] = 0.0
    return hm_a.with_values(a), hm_b.with_values(b)
