import pytest

from linepair.config import RunConfig, dump_config, from_mapping, load_config
from linepair.cutline import CutPolicy
from linepair.errors import ConfigError
from linepair.evaluation import APStyle

DEFAULTS = {
    "stride": 4,
    "tau": 0.3,
    "use_cutline": True,
    "cutline.area_thresh": 100,
    "cutline.ratio_thresh": 1.5,
    "cutline.cut_len": 10,
    "cutline.policy": "prose_any_violation",
    "grouping.midpoint_tol": 0.15,
    "grouping.angle_min": 60.0,
    "grouping.angle_max": 120.0,
    "grouping.extension_tol": 0.1,
    "sim.blur_sigma": 1.5,
    "sim.noise_amp": 0.05,
    "sim.rng_seed": 0,
    "loss.gamma": 2.0,
    "loss.w_ep": 0.5,
    "loss.w_hp": 0.5,
    "ap_style": "continuous",
    "iou_thresh": 0.5,
}


def test_default_snapshot():
    assert RunConfig().flat() == DEFAULTS


def test_dump_load_round_trip(tmp_path):
    cfg = from_mapping({"stride": 8, "cutline.policy": "pseudocode_both_violations", "sim.rng_seed": 7})
    path = tmp_path / "run.toml"
    path.write_text(dump_config(cfg))
    assert load_config(path) == cfg


def test_nested_and_dotted_keys(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text('tau = 0.4\nap_style = "eleven_point"\ngrouping.angle_min = 70\n'
                    '[cutline]\nenabled = false\ncut_len = 6\n')
    cfg = load_config(path)
    assert cfg.binarize_tau == 0.4 and cfg.ap_style is APStyle.eleven_point
    assert not cfg.use_cutline and cfg.cutline.cut_len == 6 and cfg.grouping.angle_min == 70
    assert cfg.cutline.policy is CutPolicy.prose_any_violation


@pytest.mark.parametrize("data", [
    {"bogus": 1},
    {"cutline.bogus": 1},
    {"tau": 1.5},
    {"stride": 0},
    {"cutline.policy": "sometimes"},
    {"ap_style": "coco"},
    {"iou_thresh": 0},
    {"grouping.angle_min": 130},
])
def test_invalid(data):
    with pytest.raises(ConfigError):
        from_mapping(data)


def test_bad_toml(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("tau = = 3\n")
    with pytest.raises(ConfigError):
        load_config(path)
