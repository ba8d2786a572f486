"""Per-frame feature construction: the 52-element representation vector
(34 normalized coordinates + 17 confidences + their sum) and the
12-element joint angle vector with per-angle confidence weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import model
from .errors import DegenerateBoundingBox
from .model import AngleTriple, Keypoint, PoseFrame, angle_at

# The 12 joint angles, symmetric over left/right: elbows, shoulders
# (upper arm vs torso), hips (torso vs thigh), knees, neck line
# (nose-shoulder-hip) and the torso cross (shoulder-hip-other hip).
ANGLE_TRIPLES: tuple[AngleTriple, ...] = (
    AngleTriple(model.L_SHOULDER, model.L_ELBOW, model.L_WRIST),   # 0 left elbow
    AngleTriple(model.R_SHOULDER, model.R_ELBOW, model.R_WRIST),   # 1 right elbow
    AngleTriple(model.L_ELBOW, model.L_SHOULDER, model.L_HIP),     # 2 left shoulder
    AngleTriple(model.R_ELBOW, model.R_SHOULDER, model.R_HIP),     # 3 right shoulder
    AngleTriple(model.L_SHOULDER, model.L_HIP, model.L_KNEE),      # 4 left hip
    AngleTriple(model.R_SHOULDER, model.R_HIP, model.R_KNEE),      # 5 right hip
    AngleTriple(model.L_HIP, model.L_KNEE, model.L_ANKLE),         # 6 left knee
    AngleTriple(model.R_HIP, model.R_KNEE, model.R_ANKLE),         # 7 right knee
    AngleTriple(model.NOSE, model.L_SHOULDER, model.L_HIP),        # 8 left neck line
    AngleTriple(model.NOSE, model.R_SHOULDER, model.R_HIP),        # 9 right neck line
    AngleTriple(model.L_SHOULDER, model.L_HIP, model.R_HIP),       # 10 left torso cross
    AngleTriple(model.R_SHOULDER, model.R_HIP, model.L_HIP),       # 11 right torso cross
)

NUM_ANGLES = len(ANGLE_TRIPLES)
REPRESENTATION_DIM = 2 * model.NUM_PARTS + model.NUM_PARTS + 1  # 52


@dataclass(frozen=True)
class RepresentationVector:
    """coords: [x0, y0, ..., x16, y16] normalized; confidences per part;
    confidence_sum = sum(confidences)."""

    coords: tuple[float, ...]
    confidences: tuple[float, ...]
    confidence_sum: float

    def __post_init__(self):
        if len(self.coords) != 2 * model.NUM_PARTS:
            raise ValueError("coords must have 34 elements")
        if len(self.confidences) != model.NUM_PARTS:
            raise ValueError("confidences must have 17 elements")

    def as_array(self) -> np.ndarray:
        return np.array(self.coords + self.confidences + (self.confidence_sum,))


@dataclass(frozen=True)
class AngleFeatureVector:
    """angles: 12 joint angles in [0, pi]; weights: mean confidence of the
    three keypoints forming each angle."""

    angles: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.angles) != NUM_ANGLES or len(self.weights) != NUM_ANGLES:
            raise ValueError(f"expected {NUM_ANGLES} angles and weights")


def confident_bbox(frame: PoseFrame) -> tuple[float, float, float, float]:
    """(min_x, min_y, max_x, max_y) over keypoints with confidence > 0."""
    pts = [(kp.x, kp.y) for kp in frame.keypoints if not kp.missing]
    if len(pts) < 2:
        raise DegenerateBoundingBox("fewer than 2 confident keypoints")
    xs, ys = zip(*pts)
    return (min(xs), min(ys), max(xs), max(ys))


def normalize_frame(frame: PoseFrame) -> PoseFrame:
    """Translate the confident bounding box to the origin and scale by its
    diagonal so confident coordinates land in [0,1] x [0,1]."""
    min_x, min_y, max_x, max_y = confident_bbox(frame)
    diag = math.hypot(max_x - min_x, max_y - min_y)
    if diag == 0.0:
        raise DegenerateBoundingBox("zero-area bounding box")
    kps = tuple(
        Keypoint(kp.part_id, (kp.x - min_x) / diag, (kp.y - min_y) / diag,
                 kp.confidence, kp.origin)
        for kp in frame.keypoints
    )
    return replace(frame, keypoints=kps, width=1.0, height=1.0)


def compute_representation(frame: PoseFrame) -> RepresentationVector:
    """Layout: [x0, y0, x1, y1, ...], confidences in part order, then the
    confidence sum.  The frame should already be filled and normalized."""
    coords = []
    for kp in frame.keypoints:
        coords.extend((kp.x, kp.y))
    confs = tuple(kp.confidence for kp in frame.keypoints)
    return RepresentationVector(tuple(coords), confs, sum(confs))


_TRIPLE_A = np.array([t.a for t in ANGLE_TRIPLES])
_TRIPLE_V = np.array([t.vertex for t in ANGLE_TRIPLES])
_TRIPLE_B = np.array([t.b for t in ANGLE_TRIPLES])


def compute_features(frame: PoseFrame) -> tuple[RepresentationVector,
                                                AngleFeatureVector]:
    """Normalization plus both feature vectors in one vectorized pass.

    Equivalent to normalize_frame -> compute_representation /
    compute_angles but without intermediate frame objects; used on the
    per-frame hot path."""
    from .errors import DegenerateRay, MissingKeypoint

    coords = np.array([(kp.x, kp.y) for kp in frame.keypoints])
    conf = np.array([kp.confidence for kp in frame.keypoints])

    present = conf > 0.0
    if int(present.sum()) < 2:
        raise DegenerateBoundingBox("fewer than 2 confident keypoints")
    mins = coords[present].min(axis=0)
    span = coords[present].max(axis=0) - mins
    diag = math.hypot(span[0], span[1])
    if diag == 0.0:
        raise DegenerateBoundingBox("zero-area bounding box")
    norm = (coords - mins) / diag

    rep = RepresentationVector(tuple(norm.ravel()), tuple(conf),
                               float(conf.sum()))

    needed = np.stack([_TRIPLE_A, _TRIPLE_V, _TRIPLE_B])
    missing = ~present[needed]
    if missing.any():
        part = int(needed[missing][0])
        raise MissingKeypoint(model.PART_NAMES[part])
    va = norm[_TRIPLE_A] - norm[_TRIPLE_V]
    vb = norm[_TRIPLE_B] - norm[_TRIPLE_V]
    na = np.hypot(va[:, 0], va[:, 1])
    nb = np.hypot(vb[:, 0], vb[:, 1])
    if (na == 0.0).any() or (nb == 0.0).any():
        raise DegenerateRay("zero-length ray")
    cos = np.clip((va * vb).sum(axis=1) / (na * nb), -1.0, 1.0)
    ang = AngleFeatureVector(tuple(np.arccos(cos)),
                             tuple(conf[needed].mean(axis=0)))
    return rep, ang


def compute_angles(frame: PoseFrame,
                   triples: tuple[AngleTriple, ...] = ANGLE_TRIPLES
                   ) -> AngleFeatureVector:
    """Joint angles plus weights (mean confidence of each angle's parts)."""
    angles = []
    weights = []
    for triple in triples:
        angles.append(angle_at(frame, triple))
        weights.append((frame.kp(triple.a).confidence
                        + frame.kp(triple.vertex).confidence
                        + frame.kp(triple.b).confidence) / 3.0)
    return AngleFeatureVector(tuple(angles), tuple(weights))
