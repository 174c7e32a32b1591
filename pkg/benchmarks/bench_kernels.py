"""Compare the numba kernels with the pure numpy/scipy fallback.

The backend is fixed at import time by ``LINEPAIR_DISABLE_NUMBA``, so each
backend runs in its own subprocess::

    python3 benchmarks/bench_kernels.py            # both backends, summary table
    python3 benchmarks/bench_kernels.py --repeat 9

Timings are best-of-``repeat`` wall-clock seconds after one warm-up call
(the warm-up absorbs JIT compilation).
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _best(fn, repeat: int) -> float:
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def worker(repeat: int) -> dict:
    import numpy as np

    from linepair import _kernels
    from linepair.config import RunConfig
    from linepair.heatmap import render_all
    from linepair.pipeline import run_pipeline
    from linepair.synth import random_scene

    rng = np.random.default_rng(0)
    masks = [rng.random((512, 512)) < 0.45 for _ in range(4)]
    lines = rng.integers(0, 320, size=(5000, 4))
    scenes = [random_scene(rng, 10, 12, 1280, 659, image_id=f"b{i}", size=(40, 100)) for i in range(10)]
    cfg = RunConfig()
    maps = [render_all(s, cfg.stride) for s in scenes]

    def label():
        for m in masks:
            _kernels.label4(m)

    def draw():
        grid = np.zeros((320, 320))
        for x0, y0, x1, y1 in lines:
            _kernels.draw_line4(grid, int(x0), int(y0), int(x1), int(y1))

    def render():
        for s in scenes:
            render_all(s, cfg.stride)

    def decode():
        for m in maps:
            run_pipeline(m, cfg)

    return {
        "backend": _kernels.BACKEND,
        "label4 (4 x 512^2 masks)": _best(label, repeat),
        "draw_line4 (5000 lines)": _best(draw, repeat),
        "render (10 scenes)": _best(render, repeat),
        "decode (10 scenes)": _best(decode, repeat),
    }


def run_backend(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, LINEPAIR_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, __file__, "--worker", "--repeat", str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)
    if args.worker:
        print(json.dumps(worker(args.repeat)))
        return 0

    fast, slow = run_backend(False, args.repeat), run_backend(True, args.repeat)
    if fast["backend"] != "numba":
        print("numba is unavailable; both runs used the fallback", file=sys.stderr)
    print(f"{'kernel':<28}{fast['backend']:>12}{slow['backend']:>12}{'ratio':>10}")
    for key in fast:
        if key == "backend":
            continue
        print(f"{key:<28}{fast[key]:>11.4f}s{slow[key]:>11.4f}s{slow[key] / fast[key]:>9.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
