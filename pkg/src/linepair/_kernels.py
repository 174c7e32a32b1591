"""Hot inner loops: 4-connected line rasterization and 4-connected labeling.

Each kernel is compiled with numba when it is importable.  Setting the
environment variable ``LINEPAIR_DISABLE_NUMBA=1`` (read once, at import time)
selects the pure numpy/scipy path instead; both paths produce identical results.
"""
from __future__ import annotations

import os

import numpy as np
from scipy import ndimage

_DISABLED = os.environ.get("LINEPAIR_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


BACKEND = "numba" if HAVE_NUMBA else "numpy"


# -- line rasterization -------------------------------------------------------

def _draw_line4_py(grid, x0, y0, x1, y1, value):
    """Bresenham variant that steps one axis at a time, so the run is 4-connected.

    Cells outside ``grid`` are skipped (the line is clipped, not shifted).
    Returns the number of cells written.
    """
    rows, cols = grid.shape
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    n = 0
    while True:
        if 0 <= y0 < rows and 0 <= x0 < cols:
            grid[y0, x0] = value
            n += 1
        if x0 == x1 and y0 == y1:
            break
        e2 = 2 * err
        if e2 - dy > dx - e2:
            err += dy
            x0 += sx
        else:
            err += dx
            y0 += sy
    return n


_draw_line4_jit = njit(cache=True)(_draw_line4_py) if HAVE_NUMBA else None


def draw_line4(grid: np.ndarray, x0: int, y0: int, x1: int, y1: int, value: float = 1.0) -> int:
    if HAVE_NUMBA:
        return _draw_line4_jit(grid, int(x0), int(y0), int(x1), int(y1), float(value))
    return _draw_line4_py(grid, int(x0), int(y0), int(x1), int(y1), value)


# -- connected components -----------------------------------------------------

@njit(cache=True)
def _find(p, i):
    root = i
    while p[root] != root:
        root = p[root]
    while p[i] != root:
        nxt = p[i]
        p[i] = root
        i = nxt
    return root


@njit(cache=True)
def _union(p, a, b):
    a = _find(p, a)
    b = _find(p, b)
    if a < b:
        p[b] = a
        return a
    if b < a:
        p[a] = b
    return b


@njit(cache=True)
def _label4_jit(mask):
    rows, cols = mask.shape
    prov = np.zeros((rows, cols), dtype=np.int32)
    # provisional label k lives at parent[k]; label 0 is background
    parent = np.zeros(rows * cols // 2 + 2, dtype=np.int32)
    nxt = 1
    for r in range(rows):
        for c in range(cols):
            if not mask[r, c]:
                continue
            left = prov[r, c - 1] if c > 0 else 0
            up = prov[r - 1, c] if r > 0 else 0
            if left and up:
                prov[r, c] = _union(parent, left, up) if left != up else left
            elif left or up:
                prov[r, c] = left + up
            else:
                parent[nxt] = nxt
                prov[r, c] = nxt
                nxt += 1

    # parents always carry smaller labels, so one forward pass flattens every
    # chain; roots are then met in raster order of each component's first pixel
    remap = np.zeros(nxt, dtype=np.int32)
    n = 0
    for k in range(1, nxt):
        if parent[k] == k:
            n += 1
            remap[k] = n
        else:
            parent[k] = parent[parent[k]]
            remap[k] = remap[parent[k]]
    for r in range(rows):
        for c in range(cols):
            if prov[r, c]:
                prov[r, c] = remap[prov[r, c]]
    return prov, n


_FOUR = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def _label4_numpy(mask):
    labels, n = ndimage.label(mask, structure=_FOUR)
    return labels.astype(np.int32), int(n)


def label4(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """Label 4-connected foreground components; labels are 1..n in raster order of first pixel."""
    mask = np.ascontiguousarray(mask, dtype=np.bool_)
    if HAVE_NUMBA:
        labels, n = _label4_jit(mask)
        return labels, int(n)
    return _label4_numpy(mask)
