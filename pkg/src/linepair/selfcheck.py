"""Numerical self-checks runnable from the command line."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import heatmap, oracles
from .config import RunConfig
from .decoder import BinaryMask, connected_components
from .geometry import polygon_iou
from .heatmap import Heatmap, LossWeights, render_all
from .pipeline import evaluate, run_pipeline
from .synth import random_scene


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def check_gradient(n_grids: int = 5, seed: int = 0, tol: float = 1e-5) -> CheckResult:
    rng = np.random.default_rng(seed)
    weights = LossWeights()
    worst = 0.0
    for _ in range(n_grids):
        gt = (rng.random((6, 6)) < 0.3).astype(float)
        pred = rng.uniform(0.05, 0.95, gt.shape)
        n = int(rng.integers(1, 5))
        analytic = heatmap.focal_loss_grad(pred, gt, weights, n)
        numeric = oracles.central_difference(lambda x: heatmap.focal_loss(x, gt, weights, n), pred, 1e-6)
        rel = np.abs(analytic - numeric) / np.maximum(np.abs(numeric), 1e-8)
        worst = max(worst, float(rel.max()))
    return CheckResult("focal loss gradient vs central differences", worst < tol, f"max rel err {worst:.2e}")


def check_components(n_masks: int = 20, seed: int = 1) -> CheckResult:
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(n_masks):
        bits = rng.random((64, 64)) < rng.uniform(0.2, 0.6)
        src = Heatmap(bits.astype(float), 1, heatmap.Channel.A_fuselage)
        got = {frozenset(r.pixels) for r in connected_components(BinaryMask(bits, 0.5), src)}
        want = set(oracles.flood_fill_regions(bits))
        bad += got != want
    return CheckResult("4-connected labeling vs flood fill", bad == 0, f"{bad}/{n_masks} masks differ")


def check_iou(n_pairs: int = 10, seed: int = 2, tol: float = 0.005) -> CheckResult:
    from scipy.spatial import ConvexHull

    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(n_pairs):
        polys = []
        for _ in range(2):
            pts = rng.normal(size=(8, 2)) + rng.uniform(-0.7, 0.7, 2)
            polys.append(pts[ConvexHull(pts).vertices])
        exact = polygon_iou(*polys)
        mc = oracles.monte_carlo_iou(*polys, n_samples=200_000, seed=k)
        worst = max(worst, abs(exact - mc))
    return CheckResult("convex polygon IoU vs Monte Carlo", worst < tol, f"max abs diff {worst:.4f}")


def check_round_trip(seed: int = 3) -> CheckResult:
    rng = np.random.default_rng(seed)
    cfg = RunConfig()
    scenes = [random_scene(rng, 5, 3 * cfg.stride, width=640, height=480, image_id=f"rt{i}") for i in range(3)]
    dets = {s.image_id: run_pipeline(render_all(s, cfg.stride), cfg) for s in scenes}
    ap = evaluate(dets, scenes, "hbb", cfg).ap
    return CheckResult("hard ground-truth round trip AP", ap == 1.0, f"AP = {ap:.4f}")


CHECKS = (check_gradient, check_components, check_iou, check_round_trip)


def run_selfcheck() -> list[CheckResult]:
    results = []
    for check in CHECKS:
        t0 = time.perf_counter()
        try:
            res = check()
        except Exception as exc:  # a crashing check is a failed check
            res = CheckResult(check.__name__, False, f"raised {type(exc).__name__}: {exc}")
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results
