"""Heatmap rasterization, prediction simulation and the focal-style training loss.

Heatmaps live on a grid of ``ceil(H / stride) x ceil(W / stride)`` cells.  A
pixel coordinate ``x`` falls in cell ``floor(x / stride)``, i.e. the cell whose
centre ``(c + 0.5) * stride`` is nearest; the decoder maps cells back to
pixels with the same centre convention.
"""
from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import _kernels
from .annotations import Keypoints5, SceneAnnotation, to_segments
from .errors import HeatmapFormatError, ShapeMismatch

EPS = 1e-7
MAGIC = "XHM"
FORMAT_VERSION = 1


class Channel(enum.Enum):
    A_fuselage = "A"
    B_wings = "B"
    C_endpoints = "C"
    D_head = "D"

    @classmethod
    def parse(cls, token: str) -> "Channel":
        for ch in cls:
            if token in (ch.name, ch.value):
                return ch
        raise ValueError(f"unknown channel {token!r}")


@dataclass
class Heatmap:
    values: np.ndarray
    stride: int
    channel: Channel

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.size == 0:
            raise ValueError("heatmap values must be a non-empty 2-D grid")
        if int(self.stride) != self.stride or self.stride < 1:
            raise ValueError("stride must be a positive integer")
        self.stride = int(self.stride)
        if not np.all((self.values >= 0.0) & (self.values <= 1.0)):
            raise ValueError("heatmap values must lie in [0, 1]")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def with_values(self, values: np.ndarray) -> "Heatmap":
        return Heatmap(values, self.stride, self.channel)


@dataclass(frozen=True)
class LossWeights:
    gamma: float = 2.0
    w_ep: float = 0.5
    w_hp: float = 0.5

    def __post_init__(self):
        for name in ("gamma", "w_ep", "w_hp"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0")


@dataclass(frozen=True)
class SimulationConfig:
    blur_sigma: float = 1.5
    noise_amp: float = 0.05
    rng_seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.blur_sigma) and self.blur_sigma >= 0):
            raise ValueError("blur_sigma must be finite and >= 0")
        if not (math.isfinite(self.noise_amp) and self.noise_amp >= 0):
            raise ValueError("noise_amp must be finite and >= 0")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be unsigned")


def grid_shape(height: int, width: int, stride: int) -> tuple[int, int]:
    return (-(-height // stride), -(-width // stride))


def point_to_cell(p, stride: int, shape: tuple[int, int]) -> tuple[int, int]:
    """``(col, row)`` of the cell containing pixel point ``p``, clipped to the grid."""
    rows, cols = shape
    c = min(max(int(math.floor(p[0] / stride)), 0), cols - 1)
    r = min(max(int(math.floor(p[1] / stride)), 0), rows - 1)
    return c, r


def cell_to_point(col: float, row: float, stride: int) -> tuple[float, float]:
    return ((col + 0.5) * stride, (row + 0.5) * stride)


def render_gt(scene: SceneAnnotation, stride: int, channel: Channel) -> Heatmap:
    """Hard {0, 1} ground truth for one channel.

    A and B draw each fuselage / wing segment as a 4-connected run of cells; C
    marks the four segment endpoints; D marks the head.  Rotated-box scenes
    have no known head, so their D channel stays empty.
    """
    shape = grid_shape(scene.height, scene.width, stride)
    grid = np.zeros(shape, dtype=np.float64)
    for aircraft in scene.aircraft:
        l1, l2 = to_segments(aircraft)
        if channel in (Channel.A_fuselage, Channel.B_wings):
            seg = l1 if channel is Channel.A_fuselage else l2
            c0, r0 = point_to_cell(seg.p0, stride, shape)
            c1, r1 = point_to_cell(seg.p1, stride, shape)
            _kernels.draw_line4(grid, c0, r0, c1, r1, 1.0)
        elif channel is Channel.C_endpoints:
            for p in (l1.p0, l1.p1, l2.p0, l2.p1):
                c, r = point_to_cell(p, stride, shape)
                grid[r, c] = 1.0
        elif isinstance(aircraft, Keypoints5):
            c, r = point_to_cell(aircraft.head, stride, shape)
            grid[r, c] = 1.0
    return Heatmap(grid, stride, channel)


def render_all(scene: SceneAnnotation, stride: int) -> dict[Channel, Heatmap]:
    return {ch: render_gt(scene, stride, ch) for ch in Channel}


def simulate_prediction(gt: Heatmap, cfg: SimulationConfig) -> Heatmap:
    """Imitate a trained network's soft output from hard ground truth.

    Blur, rescale so each ground-truth structure peaks at 1 (cells take the
    scale of their nearest structure), add uniform noise, clamp.
    """
    values = gt.values
    if cfg.blur_sigma > 0:
        blurred = ndimage.gaussian_filter(values, cfg.blur_sigma, mode="constant", cval=0.0)
        labels, n = _kernels.label4(values > 0)
        if n:
            peaks = np.asarray(ndimage.maximum(blurred, labels, index=np.arange(1, n + 1)))
            _, (ri, ci) = ndimage.distance_transform_edt(labels == 0, return_indices=True)
            nearest = labels[ri, ci]
            out = np.minimum(blurred / peaks[nearest - 1], 1.0)
        else:
            out = blurred
    else:
        out = values.copy()
    if cfg.noise_amp > 0:
        rng = np.random.default_rng(cfg.rng_seed)
        out = out + rng.uniform(0.0, cfg.noise_amp, size=out.shape)
    return gt.with_values(np.clip(out, 0.0, 1.0))


# -- loss --------------------------------------------------------------------

def _loss_inputs(pred, gt):
    p = pred.values if isinstance(pred, Heatmap) else np.asarray(pred, dtype=np.float64)
    g = gt.values if isinstance(gt, Heatmap) else np.asarray(gt, dtype=np.float64)
    if p.shape != g.shape:
        raise ShapeMismatch(f"prediction shape {p.shape} != ground-truth shape {g.shape}")
    if not np.all((g == 0) | (g == 1)):
        raise ValueError("ground truth must be binary")
    return p, g == 1


def focal_loss(pred, gt, weights: LossWeights = LossWeights(), n_aircraft: int = 1) -> float:
    r"""Focal-style pixel loss normalized by the number of aircraft ``N``.

    .. math::

        L = -\frac{1}{N}\sum_{xy} \begin{cases}
            (1 - v)^\gamma \log v & g_{xy} = 1 \\
            v^\gamma \log(1 - v) & g_{xy} = 0
        \end{cases}

    ``v`` is the prediction clamped to ``[EPS, 1 - EPS]``.
    """
    if n_aircraft < 1:
        raise ValueError("n_aircraft must be >= 1")
    p, pos = _loss_inputs(pred, gt)
    v = np.clip(p, EPS, 1.0 - EPS)
    gamma = weights.gamma
    terms = np.where(pos, (1.0 - v) ** gamma * np.log(v), v ** gamma * np.log1p(-v))
    return float(-terms.sum() / n_aircraft)


def focal_loss_grad(pred, gt, weights: LossWeights = LossWeights(), n_aircraft: int = 1) -> np.ndarray:
    r"""Analytic :math:`\partial L / \partial v` per cell.

    With :math:`\gamma` the focal exponent:

    * positive cells: :math:`-\frac{1}{N}\left[(1-v)^\gamma / v - \gamma (1-v)^{\gamma-1}\log v\right]`
    * negative cells: :math:`-\frac{1}{N}\left[\gamma v^{\gamma-1}\log(1-v) - v^\gamma / (1-v)\right]`

    Cells where the clamp is active get gradient 0.
    """
    if n_aircraft < 1:
        raise ValueError("n_aircraft must be >= 1")
    p, pos = _loss_inputs(pred, gt)
    v = np.clip(p, EPS, 1.0 - EPS)
    gamma = weights.gamma
    q = 1.0 - v
    # gamma == 0 makes the power-law prefactor vanish; avoid 0 * inf at v -> 0.
    dpow_q = gamma * q ** (gamma - 1.0) if gamma else np.zeros_like(v)
    dpow_v = gamma * v ** (gamma - 1.0) if gamma else np.zeros_like(v)
    g_pos = q ** gamma / v - dpow_q * np.log(v)
    g_neg = dpow_v * np.log1p(-v) - v ** gamma / q
    grad = -np.where(pos, g_pos, g_neg) / n_aircraft
    grad[(p < EPS) | (p > 1.0 - EPS)] = 0.0
    return grad


def total_loss(preds, gts, weights: LossWeights = LossWeights(), n_aircraft: int = 1) -> float:
    """Segment loss over A and B plus weighted endpoint (C) and head (D) losses.

    ``preds`` and ``gts`` are mappings keyed by :class:`Channel` or sequences in A, B, C, D order.
    """
    def pick(maps, ch):
        if isinstance(maps, dict):
            return maps[ch]
        return maps[list(Channel).index(ch)]

    pa, pb, pc, pd = (pick(preds, ch) for ch in Channel)
    ga, gb, gc, gd = (pick(gts, ch) for ch in Channel)
    for p, g in ((pa, ga), (pb, gb), (pc, gc), (pd, gd)):
        _loss_inputs(p, g)
    seg = focal_loss(pa, ga, weights, n_aircraft) + focal_loss(pb, gb, weights, n_aircraft)
    total = seg
    if weights.w_ep:
        total += weights.w_ep * focal_loss(pc, gc, weights, n_aircraft)
    if weights.w_hp:
        total += weights.w_hp * focal_loss(pd, gd, weights, n_aircraft)
    return total


# -- file format ---------------------------------------------------------------

def format_heatmap(hm: Heatmap) -> str:
    buf = io.StringIO()
    rows, cols = hm.shape
    buf.write(f"{MAGIC} {FORMAT_VERSION} {hm.channel.name} {hm.stride}\n")
    buf.write(f"{rows} {cols}\n")
    for row in hm.values:
        buf.write(" ".join(f"{v:.17g}" for v in row))
        buf.write("\n")
    return buf.getvalue()


def parse_heatmap(text: str) -> Heatmap:
    lines = text.splitlines()
    if len(lines) < 2:
        raise HeatmapFormatError("truncated heatmap file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != MAGIC:
        raise HeatmapFormatError(f"bad header line {lines[0]!r}")
    if head[1] != str(FORMAT_VERSION):
        raise HeatmapFormatError(f"unsupported version {head[1]}")
    try:
        channel = Channel.parse(head[2])
        stride = int(head[3])
        rows, cols = (int(t) for t in lines[1].split())
    except ValueError as exc:
        raise HeatmapFormatError(str(exc)) from None
    body = lines[2:2 + rows]
    if len(body) != rows:
        raise HeatmapFormatError(f"expected {rows} rows, found {len(body)}")
    try:
        values = np.array([[float(t) for t in line.split()] for line in body], dtype=np.float64)
    except ValueError as exc:
        raise HeatmapFormatError(str(exc)) from None
    if values.shape != (rows, cols):
        raise HeatmapFormatError(f"expected {rows}x{cols} values, got {values.shape}")
    try:
        return Heatmap(values, stride, channel)
    except ValueError as exc:
        raise HeatmapFormatError(str(exc)) from None


def read_heatmap(path) -> Heatmap:
    with open(path, encoding="utf-8") as fh:
        return parse_heatmap(fh.read())
