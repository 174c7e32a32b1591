"""Command-line entry point: ``linepair {convert,render,decode,eval,selfcheck}``.

Exit codes: 0 ok, 1 usage, 2 data error, 3 self-check failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import annotations as ann
from .config import RunConfig, from_mapping, load_config
from .cutline import CutPolicy
from .errors import LinePairError
from .evaluation import APStyle, Form
from .heatmap import Channel, format_heatmap, read_heatmap, render_gt, simulate_prediction
from .pipeline import gt_shapes, run_pipeline
from .shapes import HorizontalBox, PentagonMask, RotatedBox

log = logging.getLogger("linepair")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_SELFCHECK = 0, 1, 2, 3
_HEATMAP_NAME = re.compile(r"^(?P<image_id>.+)\.(?P<channel>[ABCD])\.xhm$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_text(path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def build_config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    over: dict = {}
    if getattr(args, "stride", None) is not None:
        over["stride"] = args.stride
    if getattr(args, "tau", None) is not None:
        over["binarize_tau"] = args.tau
    if getattr(args, "iou", None) is not None:
        over["iou_thresh"] = args.iou
    if getattr(args, "ap_style", None) is not None:
        over["ap_style"] = args.ap_style
    if getattr(args, "cut_policy", None) is not None:
        over["cutline.policy"] = args.cut_policy
    if getattr(args, "no_cutline", False):
        over["use_cutline"] = False
    for flag, key in (("seed", "rng_seed"), ("blur", "blur_sigma"), ("noise", "noise_amp")):
        if getattr(args, flag, None) is not None:
            over[f"sim.{key}"] = getattr(args, flag)
    return from_mapping(over, base=cfg) if over else cfg


# -- convert -------------------------------------------------------------------

def cmd_convert(args) -> int:
    expected = {"kp2seg": "kp", "rbox2seg": "rbox"}.get(args.mode)
    out_lines = []
    for i, line in enumerate(_read_text(args.input).splitlines()):
        if not line.strip():
            continue
        scene = ann.parse_scene(line, index=i)
        if expected and scene.kind != expected:
            raise ann.MalformedRecord(f"{scene.kind} record in --mode {args.mode}", i)
        pairs = [{"l1": l1.to_list(), "l2": l2.to_list()} for l1, l2 in scene.segment_pairs()]
        out_lines.append(json.dumps({
            "image_id": scene.image_id, "height": scene.height, "width": scene.width,
            "source": scene.kind, "pairs": pairs,
        }))
    text = "".join(s + "\n" for s in out_lines)
    if args.output:
        atomic_write(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- render --------------------------------------------------------------------

def channel_seed(seed: int, image_index: int, channel: Channel) -> int:
    """Independent, reproducible noise seed per image and channel."""
    ss = np.random.SeedSequence([seed, image_index, list(Channel).index(channel)])
    return int(ss.generate_state(1)[0])


def cmd_render(args) -> int:
    cfg = build_config(args)
    scenes = ann.read_annotations(args.annotations)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    targets = [out_dir / f"{s.image_id}.{ch.value}.xhm" for s in scenes for ch in Channel]
    existing = [p for p in targets if p.exists()]
    if existing and not args.force:
        raise UsageError(f"refusing to overwrite {existing[0]} (use --force)")
    for k, scene in enumerate(scenes):
        for ch in Channel:
            hm = render_gt(scene, cfg.stride, ch)
            if args.simulate:
                sim = replace(cfg.sim, rng_seed=channel_seed(cfg.sim.rng_seed, k, ch))
                hm = simulate_prediction(hm, sim)
            atomic_write(out_dir / f"{scene.image_id}.{ch.value}.xhm", format_heatmap(hm))
    print(f"rendered {len(scenes)} image(s) x 4 channels to {out_dir}")
    return EXIT_OK


# -- decode --------------------------------------------------------------------

def collect_heatmaps(directory) -> dict[str, dict[Channel, Path]]:
    found: dict[str, dict[Channel, Path]] = {}
    for path in sorted(Path(directory).iterdir()):
        m = _HEATMAP_NAME.match(path.name)
        if m:
            found.setdefault(m["image_id"], {})[Channel.parse(m["channel"])] = path
    return found


def cmd_decode(args) -> int:
    cfg = build_config(args)
    files = collect_heatmaps(args.heatmap_dir)
    det_lines, overlay, failures = [], {}, 0
    for image_id in sorted(files):
        try:
            maps = {ch: read_heatmap(p) for ch, p in files[image_id].items()}
            dets = run_pipeline(maps, cfg)
        except (LinePairError, ValueError, OSError) as exc:
            failures += 1
            log.error("image %s: %s", image_id, exc)
            continue
        det_lines.append(json.dumps({"image_id": image_id, "detections": [d.to_dict() for d in dets]}))
        overlay[image_id] = [d.overlay() for d in dets]
    text = "".join(s + "\n" for s in det_lines)
    if args.output:
        atomic_write(args.output, text)
    else:
        sys.stdout.write(text)
    if args.overlay:
        atomic_write(args.overlay, json.dumps(overlay, indent=1))
    log.info("decoded %d image(s), %d failed", len(det_lines), failures)
    return EXIT_OK if failures == 0 else EXIT_DATA


# -- eval ----------------------------------------------------------------------

def _shape_from_json(form: Form, d: dict):
    if form is Form.hbb:
        return HorizontalBox(*map(float, d["hbb"]))
    if form is Form.rbb:
        r = d["rbb"]
        return RotatedBox(float(r["cx"]), float(r["cy"]), float(r["w"]), float(r["h"]), float(r["angle"]))
    if d.get("pentagon") is None:
        return None
    return PentagonMask(tuple((float(x), float(y)) for x, y in d["pentagon"]))


def read_detections(path, form: Form) -> dict[str, list]:
    out = {}
    for i, line in enumerate(_read_text(path).splitlines()):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            items = []
            for d in rec["detections"]:
                shape = _shape_from_json(form, d)
                if shape is not None:
                    items.append((float(d["score"]), shape))
            out[rec["image_id"]] = items
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ann.MalformedRecord(f"bad detection record ({exc})", i) from None
    return out


def cmd_eval(args) -> int:
    from .evaluation import match_and_score

    cfg = build_config(args)
    form = Form(args.form)
    scenes = ann.read_annotations(args.ground_truth)
    gts = {s.image_id: gt_shapes(s, form) for s in scenes}
    dets = read_detections(args.detections, form)
    report = match_and_score(dets, gts, form, cfg.iou_thresh, cfg.ap_style)
    print(report.summary())
    if args.report:
        atomic_write(args.report, json.dumps(report.to_dict(), indent=1))
    return EXIT_OK


# -- selfcheck -----------------------------------------------------------------

def cmd_selfcheck(args) -> int:
    from .selfcheck import run_selfcheck

    results = run_selfcheck()
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("selfcheck:", "all checks passed" if ok else "FAILED")
    return EXIT_OK if ok else EXIT_SELFCHECK


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML config with dotted keys (flags win)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="linepair", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("convert", parents=[common], help="annotations -> segment pairs")
    c.add_argument("input")
    c.add_argument("--mode", choices=["auto", "kp2seg", "rbox2seg"], default="auto")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_convert)

    r = sub.add_parser("render", parents=[common], help="annotations -> A/B/C/D heatmap files")
    r.add_argument("annotations")
    r.add_argument("--out-dir", required=True)
    r.add_argument("--stride", type=int)
    r.add_argument("--simulate", action="store_true", help="blur + noise like a trained network")
    r.add_argument("--blur", type=float)
    r.add_argument("--noise", type=float)
    r.add_argument("--seed", type=int)
    r.add_argument("--force", action="store_true")
    r.set_defaults(func=cmd_render)

    d = sub.add_parser("decode", parents=[common], help="heatmap directory -> detections")
    d.add_argument("heatmap_dir")
    d.add_argument("-o", "--output")
    d.add_argument("--overlay", metavar="PATH", help="also write segment/box/pentagon geometry JSON")
    d.add_argument("--tau", type=float)
    d.add_argument("--cut-policy", choices=[p.value for p in CutPolicy])
    d.add_argument("--no-cutline", action="store_true")
    d.set_defaults(func=cmd_decode)

    e = sub.add_parser("eval", parents=[common], help="average precision of a detections file")
    e.add_argument("detections")
    e.add_argument("ground_truth")
    e.add_argument("--form", choices=[f.value for f in Form], default="hbb")
    e.add_argument("--iou", type=float)
    e.add_argument("--ap-style", choices=[s.value for s in APStyle])
    e.add_argument("--report", metavar="PATH", help="write the JSON report here")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("selfcheck", parents=[common], help="run the numerical self-checks")
    s.set_defaults(func=cmd_selfcheck)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already printed
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"linepair: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LinePairError, ValueError, OSError) as exc:
        print(f"linepair: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
