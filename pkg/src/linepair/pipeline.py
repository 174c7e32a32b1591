"""End-to-end decoding of the four prediction heatmaps of one image."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .annotations import Keypoints5, SceneAnnotation, gt_pentagon, to_segments
from .config import RunConfig
from .cutline import apply_cuts, detect_adhesions
from .decoder import extract_points, extract_segments
from .errors import LinePairError, ShapeMismatch
from .evaluation import EvalReport, Form, match_and_score
from .geometry import hbb_from_pair, pentagon_from_pair, rbb_from_pair
from .grouping import AircraftDetection, match_head, pair_segments
from .heatmap import Channel, Heatmap
from .shapes import HorizontalBox, PentagonMask, RotatedBox

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Detection:
    pair: AircraftDetection
    hbb: HorizontalBox
    rbb: RotatedBox
    pentagon: Optional[PentagonMask]

    @property
    def score(self) -> float:
        return self.pair.score

    def shape(self, form: Form):
        return getattr(self, Form(form).value)

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "hbb": self.hbb.to_list(),
            "rbb": self.rbb.to_dict(),
            "pentagon": self.pentagon.to_list() if self.pentagon else None,
            "head_resolved": self.pair.head_resolved,
        }

    def overlay(self) -> dict:
        d = self.to_dict()
        d["l1"] = self.pair.l1.to_list()
        d["l2"] = self.pair.l2.to_list()
        return d


@dataclass
class DecodeTrace:
    """Intermediate products, kept for overlays and tests."""

    cut_centers: list = field(default_factory=list)
    segments_a: list = field(default_factory=list)
    segments_b: list = field(default_factory=list)
    head_regions: list = field(default_factory=list)


def _check_channels(heatmaps: Mapping[Channel, Heatmap]) -> int:
    missing = [ch.name for ch in Channel if ch not in heatmaps]
    if missing:
        raise ShapeMismatch(f"missing heatmap channels: {missing}")
    shapes = {heatmaps[ch].shape for ch in Channel}
    strides = {heatmaps[ch].stride for ch in Channel}
    if len(shapes) != 1 or len(strides) != 1:
        raise ShapeMismatch("the four heatmaps must share shape and stride")
    return strides.pop()


def run_pipeline(heatmaps: Mapping[Channel, Heatmap], cfg: RunConfig = RunConfig(),
                 trace: Optional[DecodeTrace] = None) -> list[Detection]:
    """Cut adhesions, extract and pair segments, orient, and build the three output forms."""
    stride = _check_channels(heatmaps)
    tau = cfg.binarize_tau
    hm_a, hm_b = heatmaps[Channel.A_fuselage], heatmaps[Channel.B_wings]
    centers = []
    if cfg.use_cutline:
        endpoint_regions = extract_points(heatmaps[Channel.C_endpoints], tau)
        centers = detect_adhesions(endpoint_regions, cfg.cutline)
        if centers:
            hm_a, hm_b = apply_cuts(hm_a, hm_b, centers, cfg.cutline)
    segs_a = extract_segments(hm_a, tau)
    segs_b = extract_segments(hm_b, tau)
    heads = extract_points(heatmaps[Channel.D_head], tau)
    if trace is not None:
        trace.cut_centers, trace.segments_a, trace.segments_b, trace.head_regions = centers, segs_a, segs_b, heads

    out = []
    for pair in pair_segments(segs_a, segs_b, cfg.grouping):
        pair = match_head(pair, heads, stride)
        try:
            hbb = hbb_from_pair(pair)
            rbb = rbb_from_pair(pair)
        except LinePairError as exc:
            log.debug("dropping degenerate detection: %s", exc)
            continue
        pentagon = None
        if pair.head_resolved:
            try:
                pentagon = pentagon_from_pair(pair)
            except LinePairError as exc:
                log.debug("no pentagon for detection: %s", exc)
        out.append(Detection(pair, hbb, rbb, pentagon))
    out.sort(key=lambda d: (-d.score, d.pair.l1.canonical(), d.pair.l2.canonical()))
    return out


@dataclass
class BatchResult:
    detections: dict[str, list[Detection]]
    errors: dict[str, str]


def run_batch(images: Mapping[str, Mapping[Channel, Heatmap]], cfg: RunConfig = RunConfig()) -> BatchResult:
    """Decode many images; a failing image is recorded and skipped."""
    dets, errors = {}, {}
    for image_id, heatmaps in images.items():
        try:
            dets[image_id] = run_pipeline(heatmaps, cfg)
        except (LinePairError, ValueError) as exc:
            log.warning("image %s failed: %s", image_id, exc)
            errors[image_id] = str(exc)
    return BatchResult(dets, errors)


def gt_shapes(scene: SceneAnnotation, form: Form) -> list:
    """Ground truth of one scene converted to ``form``."""
    form = Form(form)
    out = []
    for aircraft in scene.aircraft:
        l1, l2 = to_segments(aircraft)
        pair = AircraftDetection(l1, l2, 1.0, isinstance(aircraft, Keypoints5))
        if form is Form.hbb:
            out.append(hbb_from_pair(pair))
        elif form is Form.rbb:
            out.append(aircraft if isinstance(aircraft, RotatedBox) else rbb_from_pair(pair))
        else:
            if not isinstance(aircraft, Keypoints5):
                raise ValueError("rotated-box annotations carry no heading; pentagon ground truth unavailable")
            out.append(gt_pentagon(aircraft))
    return out


def evaluate(detections: Mapping[str, list[Detection]], scenes: list[SceneAnnotation],
             form: Form = Form.hbb, cfg: RunConfig = RunConfig()) -> EvalReport:
    form = Form(form)
    gts = {s.image_id: gt_shapes(s, form) for s in scenes}
    dets = {
        image_id: [(d.score, d.shape(form)) for d in ds if d.shape(form) is not None]
        for image_id, ds in detections.items()
    }
    return match_and_score(dets, gts, form, cfg.iou_thresh, cfg.ap_style)
