"""Slow, independent reference computations used by the self-check and the tests.

Nothing here shares code with the paths it checks: loops instead of numpy
expressions, flood fill instead of union-find, sampling instead of clipping.
"""
from __future__ import annotations

import math

import numpy as np


def focal_loss_loop(pred, gt, gamma: float, n_aircraft: int, eps: float = 1e-7) -> float:
    total = 0.0
    rows, cols = len(gt), len(gt[0])
    for r in range(rows):
        for c in range(cols):
            v = min(max(float(pred[r][c]), eps), 1.0 - eps)
            if gt[r][c] == 1:
                total += (1.0 - v) ** gamma * math.log(v)
            else:
                total += v ** gamma * math.log(1.0 - v)
    return -total / n_aircraft


def central_difference(f, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Numerical gradient of scalar ``f`` at ``x`` by central differences."""
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        old = x[idx]
        x[idx] = old + h
        up = f(x)
        x[idx] = old - h
        down = f(x)
        x[idx] = old
        grad[idx] = (up - down) / (2.0 * h)
    return grad


def flood_fill_regions(mask) -> list[frozenset]:
    """4-connected regions as sets of ``(col, row)``, found by stack-based flood fill."""
    mask = np.asarray(mask, dtype=bool)
    rows, cols = mask.shape
    seen = np.zeros_like(mask)
    regions = []
    for r in range(rows):
        for c in range(cols):
            if not mask[r, c] or seen[r, c]:
                continue
            stack = [(r, c)]
            seen[r, c] = True
            cells = set()
            while stack:
                y, x = stack.pop()
                cells.add((x, y))
                for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
                    if 0 <= ny < rows and 0 <= nx < cols and mask[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        stack.append((ny, nx))
            regions.append(frozenset(cells))
    return regions


def _inside_winding(px, py, poly) -> np.ndarray:
    """Nonzero winding number test, vectorized over sample points."""
    wn = np.zeros(px.shape, dtype=np.int64)
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        is_left = (x1 - x0) * (py - y0) - (px - x0) * (y1 - y0)
        up = (y0 <= py) & (y1 > py) & (is_left > 0)
        down = (y0 > py) & (y1 <= py) & (is_left < 0)
        wn += up.astype(np.int64) - down.astype(np.int64)
    return wn != 0


def monte_carlo_iou(p, q, n_samples: int = 1_000_000, seed: int = 0) -> float:
    """IoU estimated from uniform samples over the joint bounding box."""
    p = [tuple(map(float, v)) for v in p]
    q = [tuple(map(float, v)) for v in q]
    allpts = np.array(p + q)
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(lo[0], hi[0], n_samples)
    ys = rng.uniform(lo[1], hi[1], n_samples)
    a = _inside_winding(xs, ys, p)
    b = _inside_winding(xs, ys, q)
    union = np.count_nonzero(a | b)
    return float(np.count_nonzero(a & b) / union) if union else 0.0


def covariance_axis(cells) -> tuple[float, float, np.ndarray]:
    """Centroid and unit major axis from an eigen-decomposition of the cell covariance."""
    pts = np.array(sorted(cells), dtype=np.float64)
    mean = pts.mean(axis=0)
    cov = np.zeros((2, 2))
    for p in pts:
        d = p - mean
        cov += np.outer(d, d)
    cov /= len(pts)
    vals, vecs = np.linalg.eigh(cov)
    return float(mean[0]), float(mean[1]), vecs[:, int(np.argmax(vals))]
