"""Canonical skeleton types and coordinate conventions.

Coordinates follow the image convention: x grows rightward, y grows
DOWNWARD.  All rules that talk about "higher"/"lower" body parts are
written against this convention (smaller y is higher on screen).

Keypoints use the COCO-17 part ordering:

    0 nose, 1 left eye, 2 right eye, 3 left ear, 4 right ear,
    5 left shoulder, 6 right shoulder, 7 left elbow, 8 right elbow,
    9 left wrist, 10 right wrist, 11 left hip, 12 right hip,
    13 left knee, 14 right knee, 15 left ankle, 16 right ankle

A keypoint is "missing" if and only if its confidence is 0; the
coordinates of a missing keypoint are meaningless and must not be read.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .errors import BadFrame, DegenerateRay, MissingKeypoint

NUM_PARTS = 17

NOSE = 0
L_EYE, R_EYE = 1, 2
L_EAR, R_EAR = 3, 4
L_SHOULDER, R_SHOULDER = 5, 6
L_ELBOW, R_ELBOW = 7, 8
L_WRIST, R_WRIST = 9, 10
L_HIP, R_HIP = 11, 12
L_KNEE, R_KNEE = 13, 14
L_ANKLE, R_ANKLE = 15, 16

PART_NAMES = [
    "nose", "left_eye", "right_eye", "left_ear", "right_ear",
    "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
    "left_wrist", "right_wrist", "left_hip", "right_hip",
    "left_knee", "right_knee", "left_ankle", "right_ankle",
]

# (left part, right part) pairs for mirror operations
SYMMETRIC_PAIRS = [
    (L_EYE, R_EYE), (L_EAR, R_EAR), (L_SHOULDER, R_SHOULDER),
    (L_ELBOW, R_ELBOW), (L_WRIST, R_WRIST), (L_HIP, R_HIP),
    (L_KNEE, R_KNEE), (L_ANKLE, R_ANKLE),
]

# Limb connections used for rendering skeletons in reports.
SKELETON_EDGES = [
    (NOSE, L_EYE), (NOSE, R_EYE), (L_EYE, L_EAR), (R_EYE, R_EAR),
    (L_SHOULDER, R_SHOULDER), (L_SHOULDER, L_ELBOW), (L_ELBOW, L_WRIST),
    (R_SHOULDER, R_ELBOW), (R_ELBOW, R_WRIST),
    (L_SHOULDER, L_HIP), (R_SHOULDER, R_HIP), (L_HIP, R_HIP),
    (L_HIP, L_KNEE), (L_KNEE, L_ANKLE), (R_HIP, R_KNEE), (R_KNEE, R_ANKLE),
]


class Origin(enum.Enum):
    DETECTED = "detected"
    FILLED = "filled"


class PoseLabel(enum.Enum):
    PLANK = "plank"
    SQUAT = "squat"

    @classmethod
    def parse(cls, value: str) -> "PoseLabel":
        try:
            return cls(value)
        except ValueError:
            raise BadFrame(f"unknown pose label: {value!r}") from None


@dataclass(frozen=True)
class Keypoint:
    part_id: int
    x: float
    y: float
    confidence: float
    origin: Origin = Origin.DETECTED

    @property
    def missing(self) -> bool:
        return self.confidence == 0.0


@dataclass(frozen=True)
class AngleTriple:
    """Angle measured at `vertex` between rays vertex->a and vertex->b."""

    a: int
    vertex: int
    b: int

    def __post_init__(self):
        ids = (self.a, self.vertex, self.b)
        if len(set(ids)) != 3:
            raise ValueError(f"angle triple parts must be distinct: {ids}")
        if not all(0 <= p < NUM_PARTS for p in ids):
            raise ValueError(f"angle triple parts out of range: {ids}")


@dataclass(frozen=True)
class PoseFrame:
    """One timestamped 17-keypoint skeleton.

    Immutable after construction; safe to share between threads.
    """

    keypoints: tuple[Keypoint, ...]
    width: float
    height: float
    timestamp_ms: int = 0
    rotation_applied: int = 0

    def __post_init__(self):
        if len(self.keypoints) != NUM_PARTS:
            raise BadFrame(f"expected {NUM_PARTS} keypoints, got {len(self.keypoints)}")
        for i, kp in enumerate(self.keypoints):
            if kp.part_id != i:
                raise BadFrame(f"keypoint slot {i} holds part_id {kp.part_id}")
        if self.rotation_applied not in (0, 90, 180, 270):
            raise BadFrame(f"invalid rotation: {self.rotation_applied}")

    def kp(self, part_id: int) -> Keypoint:
        return self.keypoints[part_id]

    def point(self, part_id: int) -> tuple[float, float]:
        kp = self.keypoints[part_id]
        if kp.missing:
            raise MissingKeypoint(PART_NAMES[part_id])
        return (kp.x, kp.y)

    def present_parts(self) -> list[int]:
        return [i for i, kp in enumerate(self.keypoints) if not kp.missing]

    def confidence_sum(self) -> float:
        return sum(kp.confidence for kp in self.keypoints)

    def with_keypoints(self, new: dict[int, Keypoint]) -> "PoseFrame":
        kps = tuple(new.get(i, kp) for i, kp in enumerate(self.keypoints))
        return replace(self, keypoints=kps)

    # -- wire format: {"t": int, "w": int, "h": int, "kp": [[x,y,conf] x 17]} --

    def to_json_obj(self) -> dict:
        return {
            "t": int(self.timestamp_ms),
            "w": int(round(self.width)),
            "h": int(round(self.height)),
            "kp": [[kp.x, kp.y, kp.confidence] for kp in self.keypoints],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PoseFrame":
        if not isinstance(obj, dict):
            raise BadFrame("frame payload must be an object")
        try:
            t = int(obj["t"])
            w = float(obj["w"])
            h = float(obj["h"])
            rows = obj["kp"]
        except (KeyError, TypeError, ValueError) as exc:
            raise BadFrame(f"malformed frame: {exc}") from None
        if not isinstance(rows, list) or len(rows) != NUM_PARTS:
            raise BadFrame(f"kp must list {NUM_PARTS} entries")
        if w <= 0 or h <= 0:
            raise BadFrame("frame dimensions must be positive")
        kps = []
        for i, row in enumerate(rows):
            try:
                x, y, conf = (float(v) for v in row)
            except (TypeError, ValueError):
                raise BadFrame(f"kp[{i}] must be [x, y, conf]") from None
            if not (0.0 <= conf <= 1.0) or not math.isfinite(conf):
                raise BadFrame(f"kp[{i}] confidence out of [0,1]: {conf}")
            if conf > 0.0:
                if not (math.isfinite(x) and math.isfinite(y)):
                    raise BadFrame(f"kp[{i}] has non-finite coordinates")
                if not (0.0 <= x <= w and 0.0 <= y <= h):
                    raise BadFrame(f"kp[{i}] outside image bounds")
            kps.append(Keypoint(i, x, y, conf))
        return cls(keypoints=tuple(kps), width=w, height=h, timestamp_ms=t)

    @classmethod
    def from_json(cls, text: str) -> "PoseFrame":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BadFrame(f"invalid JSON: {exc}") from None
        return cls.from_json_obj(obj)


def make_frame(points: Sequence[tuple[float, float, float]], width: float,
               height: float, timestamp_ms: int = 0) -> PoseFrame:
    """Build a frame from 17 (x, y, confidence) tuples."""
    kps = tuple(Keypoint(i, x, y, c) for i, (x, y, c) in enumerate(points))
    return PoseFrame(keypoints=kps, width=width, height=height,
                     timestamp_ms=timestamp_ms)


def angle_between(vx_a: float, vy_a: float, vx_b: float, vy_b: float) -> float:
    """Angle in [0, pi] between two 2D vectors."""
    na = math.hypot(vx_a, vy_a)
    nb = math.hypot(vx_b, vy_b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateRay("zero-length ray")
    cos_a = (vx_a * vx_b + vy_a * vy_b) / (na * nb)
    return math.acos(max(-1.0, min(1.0, cos_a)))


def angle_at(frame: PoseFrame, triple: AngleTriple) -> float:
    """Joint angle at triple.vertex, radians in [0, pi].

    Raises MissingKeypoint if any of the three parts is missing and
    DegenerateRay if either ray has zero length.
    """
    vx, vy = frame.point(triple.vertex)
    ax, ay = frame.point(triple.a)
    bx, by = frame.point(triple.b)
    return angle_between(ax - vx, ay - vy, bx - vx, by - vy)
