import numpy as np
import pytest

from linepair.cutline import CutlineConfig, CutPolicy, apply_cuts, cross_cells, detect_adhesions, is_adhesion
from linepair.decoder import extract_points
from linepair.errors import ShapeMismatch
from linepair.heatmap import Channel, Heatmap, render_all
from linepair.synth import adhesion_pair
from linepair.annotations import SceneAnnotation

PROSE = CutlineConfig()
BOTH = CutlineConfig(policy=CutPolicy.pseudocode_both_violations)


def test_default_policy_is_prose():
    assert PROSE.policy is CutPolicy.prose_any_violation


@pytest.mark.parametrize("h, w, prose, both", [
    (6, 6, False, False),
    (4, 20, True, False),
    (10, 15, True, True),
    (10, 10, True, False),
    (9, 11, False, False),
])
def test_policies(h, w, prose, both):
    assert is_adhesion(h, w, PROSE) is prose
    assert is_adhesion(h, w, BOTH) is both


def test_config_validation():
    with pytest.raises(ValueError):
        CutlineConfig(area_thresh=0)
    with pytest.raises(ValueError):
        CutlineConfig(ratio_thresh=0.5)
    with pytest.raises(ValueError):
        CutlineConfig(cut_len=-1)
    assert CutlineConfig(policy="pseudocode_both_violations").policy is CutPolicy.pseudocode_both_violations


def ones(shape=(21, 21), ch=Channel.A_fuselage):
    return Heatmap(np.ones(shape), 4, ch)


def test_no_centers_is_identity():
    a, b = ones(), ones(ch=Channel.B_wings)
    a2, b2 = apply_cuts(a, b, [])
    np.testing.assert_array_equal(a2.values, a.values)
    np.testing.assert_array_equal(b2.values, b.values)


def test_cross_zeroes_21_cells():
    a2, b2 = apply_cuts(ones(), ones(ch=Channel.B_wings), [(10, 10)])
    for out in (a2, b2):
        zero = out.values == 0
        assert zero.sum() == 21
        assert zero[10, 5:16].all() and zero[5:16, 10].all()


def test_cross_clipped_at_border_and_rounded():
    rows, cols = cross_cells((0.5, 0.5), 10, (4, 4))
    assert set(zip(cols.tolist(), rows.tolist())) == {(1, 0), (1, 1), (1, 2), (1, 3), (0, 1), (2, 1), (3, 1)}


def test_inputs_not_mutated():
    a = ones()
    apply_cuts(a, ones(ch=Channel.B_wings), [(10, 10)])
    assert a.values.all()


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        apply_cuts(ones((5, 5)), ones((5, 6)), [(1, 1)])


def test_detect_adhesions_returns_bbox_centers():
    v = np.zeros((30, 30))
    v[5, 5] = 1.0            # lone endpoint
    v[20, 10:14] = 1.0       # 1x4 blob, ratio 4
    centers = detect_adhesions(extract_points(Heatmap(v, 4, Channel.C_endpoints)))
    assert centers == [(11.5, 20.0)]


def test_wingtip_adhesion_split():
    rng = np.random.default_rng(3)
    for _ in range(5):
        a, b = adhesion_pair(rng, 4, 400, 400)
        maps = render_all(SceneAnnotation("adh", 400, 400, (a, b)), 4)
        before = extract_points(maps[Channel.B_wings])
        assert len(before) == 1
        centers = detect_adhesions(extract_points(maps[Channel.C_endpoints]))
        assert centers
        _, hb = apply_cuts(maps[Channel.A_fuselage], maps[Channel.B_wings], centers)
        assert len([r for r in extract_points(hb) if r.area >= 2]) == 2
