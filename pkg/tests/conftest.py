"""Shared fixtures: the standard exemplar database and frame builders."""

import math

import numpy as np
import pytest

from formcheck import matching, synthetic
from formcheck.model import NUM_PARTS, PoseLabel, make_frame


@pytest.fixture(scope="session")
def standard_db():
    """200-exemplar database: 90 planks + 110 squats, lightly jittered."""
    entries = []
    for i, (frame, _) in enumerate(synthetic.generate("plank", 90, 0.01, 1)):
        entries.append((frame, PoseLabel.PLANK, f"plank-{i:03d}"))
    for i, (frame, _) in enumerate(synthetic.generate("squat", 110, 0.01, 2)):
        entries.append((frame, PoseLabel.SQUAT, f"squat-{i:03d}"))
    return matching.build_database(entries, 2.0)


def grid_frame(width=640.0, height=480.0, conf=1.0):
    """All 17 parts present, spread on a diagonal-ish grid; a benign
    fully-populated frame for tests that only need valid geometry."""
    pts = []
    for i in range(NUM_PARTS):
        x = 50.0 + 30.0 * i
        y = 40.0 + 20.0 * i + 7.0 * math.sin(i)
        pts.append((x, y, conf))
    return make_frame(pts, width, height)


def random_full_frame(rng: np.random.Generator, width=640.0, height=480.0):
    """Random fully-confident frame with coordinates inside the image."""
    pts = [(float(rng.uniform(1.0, width - 1.0)),
            float(rng.uniform(1.0, height - 1.0)),
            float(rng.uniform(0.2, 1.0))) for _ in range(NUM_PARTS)]
    return make_frame(pts, width, height)
