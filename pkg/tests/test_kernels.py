"""The compiled kernels and their pure fallbacks must agree exactly."""
import numpy as np
import pytest

from linepair import _kernels, oracles


@pytest.mark.parametrize("seed", range(5))
def test_label_backends_agree(seed):
    rng = np.random.default_rng(seed)
    mask = rng.random((50, 70)) < 0.45
    a, na = _kernels.label4(mask)
    b, nb = _kernels._label4_numpy(mask)
    assert na == nb
    np.testing.assert_array_equal(a, b)
    assert na == len(oracles.flood_fill_regions(mask))


def test_label_empty_and_full():
    assert _kernels.label4(np.zeros((3, 4), bool))[1] == 0
    labels, n = _kernels.label4(np.ones((3, 4), bool))
    assert n == 1 and (labels == 1).all()


def test_diagonal_cells_are_separate():
    assert _kernels.label4(np.eye(3, dtype=bool))[1] == 3


def _cells(grid):
    r, c = np.nonzero(grid)
    return set(zip(c.tolist(), r.tolist()))


@pytest.mark.parametrize("seed", range(3))
def test_line_backends_agree(seed):
    rng = np.random.default_rng(seed)
    for _ in range(200):
        x0, y0, x1, y1 = (int(v) for v in rng.integers(-5, 45, 4))
        g1, g2 = np.zeros((40, 40)), np.zeros((40, 40))
        n1 = _kernels.draw_line4(g1, x0, y0, x1, y1)
        n2 = _kernels._draw_line4_py(g2, x0, y0, x1, y1, 1.0)
        assert n1 == n2
        np.testing.assert_array_equal(g1, g2)


def test_line_is_four_connected_and_hits_endpoints():
    rng = np.random.default_rng(7)
    for _ in range(200):
        x0, y0, x1, y1 = (int(v) for v in rng.integers(0, 30, 4))
        g = np.zeros((30, 30))
        n = _kernels.draw_line4(g, x0, y0, x1, y1)
        cells = _cells(g)
        assert (x0, y0) in cells and (x1, y1) in cells
        assert n == len(cells) == abs(x1 - x0) + abs(y1 - y0) + 1
        assert len(oracles.flood_fill_regions(g > 0)) == 1


def test_line_is_symmetric_in_cell_count():
    g1, g2 = np.zeros((20, 20)), np.zeros((20, 20))
    _kernels.draw_line4(g1, 2, 3, 15, 9)
    _kernels.draw_line4(g2, 15, 9, 2, 3)
    assert np.count_nonzero(g1) == np.count_nonzero(g2)


def test_backend_flag_reported():
    assert _kernels.BACKEND in ("numba", "numpy")
    assert _kernels.BACKEND == ("numba" if _kernels.HAVE_NUMBA else "numpy")
