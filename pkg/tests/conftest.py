import json

import numpy as np
import pytest

from linepair.annotations import Keypoints5
from linepair.grouping import AircraftDetection
from linepair.shapes import LineSegment

# head (0,10), wings (+-6,2), tail points (+-1,-4): the hand-worked aircraft
HAND_KP = Keypoints5((0.0, 10.0), (-6.0, 2.0), (-1.0, -4.0), (1.0, -4.0), (6.0, 2.0))


def seg(x0, y0, x1, y1, score=1.0):
    return LineSegment((float(x0), float(y0)), (float(x1), float(y1)), score)


def det(l1, l2, score=1.0, head=True):
    return AircraftDetection(l1, l2, score, head)


def kp_record(image_id, height, width, aircraft):
    return json.dumps({"image_id": image_id, "height": height, "width": width,
                       "aircraft_kp": [a.to_dict() for a in aircraft]})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
