"""PASCAL-VOC style average precision with greedy score-ordered matching."""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import EmptyGroundTruth
from .geometry import form_iou


class Form(str, enum.Enum):
    hbb = "hbb"
    rbb = "rbb"
    pentagon = "pentagon"


class APStyle(str, enum.Enum):
    continuous = "continuous"
    eleven_point = "eleven_point"


@dataclass
class EvalReport:
    ap: float
    precision: list[float]
    recall: list[float]
    tp: int
    fp: int
    n_gt: int
    iou_thresh: float
    form: Form
    ap_style: APStyle
    matches: dict[str, list[dict]] = field(default_factory=dict)

    def summary(self) -> str:
        return f"AP@{self.iou_thresh:g} ({self.form.value}, {self.ap_style.value}) = {self.ap:.4f}"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["form"] = self.form.value
        d["ap_style"] = self.ap_style.value
        return d


def voc_ap(recall: np.ndarray, precision: np.ndarray, style: APStyle = APStyle.continuous) -> float:
    """Area under the PR curve.

    ``continuous`` integrates the right-to-left running max of precision over
    recall; ``eleven_point`` averages that max at recall 0, 0.1, ..., 1.
    """
    recall = np.asarray(recall, dtype=float)
    precision = np.asarray(precision, dtype=float)
    if APStyle(style) is APStyle.eleven_point:
        total = 0.0
        for t in np.linspace(0.0, 1.0, 11):
            above = precision[recall >= t - 1e-12]
            total += above.max() if above.size else 0.0
        return float(total / 11.0)
    mrec = np.concatenate(([0.0], recall, [1.0]))
    mpre = np.concatenate(([0.0], precision, [0.0]))
    mpre = np.maximum.accumulate(mpre[::-1])[::-1]
    idx = np.nonzero(mrec[1:] != mrec[:-1])[0]
    return float(np.sum((mrec[idx + 1] - mrec[idx]) * mpre[idx + 1]))


def match_and_score(dets: Mapping[str, Sequence[tuple[float, object]]],
                    gts: Mapping[str, Sequence[object]],
                    form: Form = Form.hbb, iou_thresh: float = 0.5,
                    ap_style: APStyle = APStyle.continuous) -> EvalReport:
    """Rank every detection globally by score and match it to ground truth.

    ``dets`` maps image id to ``(score, shape)`` pairs and ``gts`` maps image id
    to shapes, all in the same output form.  A detection is a true positive when
    the best still-unmatched ground truth in its image overlaps it by at least
    ``iou_thresh``; that ground truth is then consumed.
    """
    form, ap_style = Form(form), APStyle(ap_style)
    n_gt = sum(len(v) for v in gts.values())
    if n_gt == 0:
        raise EmptyGroundTruth("no ground-truth objects; AP is undefined")

    ranked = []
    for image_id, items in dets.items():
        for k, (score, shape) in enumerate(items):
            ranked.append((-float(score), image_id, k, shape))
    ranked.sort(key=lambda r: (r[0], r[1], r[2]))

    used = {image_id: [False] * len(v) for image_id, v in gts.items()}
    matches: dict[str, list[dict]] = {image_id: [] for image_id in dets}
    flags = np.zeros(len(ranked), dtype=bool)
    for rank, (neg_score, image_id, k, shape) in enumerate(ranked):
        best, best_iou = None, -1.0
        for g, gt_shape in enumerate(gts.get(image_id, ())):
            if used[image_id][g]:
                continue
            iou = form_iou(shape, gt_shape)
            if iou > best_iou:
                best, best_iou = g, iou
        hit = best is not None and best_iou >= iou_thresh
        if hit:
            used[image_id][best] = True
            flags[rank] = True
        matches[image_id].append({
            "det_index": k,
            "score": -neg_score,
            "gt_index": best if hit else None,
            "iou": max(best_iou, 0.0),
            "tp": bool(hit),
        })

    tp_cum = np.cumsum(flags)
    fp_cum = np.cumsum(~flags)
    recall = tp_cum / n_gt
    precision = tp_cum / np.maximum(tp_cum + fp_cum, 1)
    ap = voc_ap(recall, precision, ap_style) if len(ranked) else 0.0
    return EvalReport(
        ap=ap,
        precision=precision.tolist(),
        recall=recall.tolist(),
        tp=int(tp_cum[-1]) if len(ranked) else 0,
        fp=int(fp_cum[-1]) if len(ranked) else 0,
        n_gt=n_gt,
        iou_thresh=iou_thresh,
        form=form,
        ap_style=ap_style,
        matches=matches,
    )
