"""Pose-specific correctness rules and correction advice.

Plank: the back is straight when the angle at the hip between
hip->shoulder and hip->ankle exceeds the threshold (strictly).  On a
failed check, the hip y against the shoulder/ankle midpoint y decides
high vs low (image convention, y grows downward, so smaller y = higher).

Squat: the knee angle must lie within pi/2 +/- tolerance (inclusive),
and the weight fraction |x_hip - x_ankle| / thigh_length must lie
strictly between the threshold and 1.  Both checks always run and their
errors accumulate.

"Feet" in the rules maps to the ankle keypoint; COCO-17 has no foot
part.  Measurements are taken on a single profile side, chosen by
summed confidence, because profile-view exercises occlude one side.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from . import model, projection
from .errors import DegenerateThigh, RankDeficient
from .matching import MatchResult
from .model import PoseFrame, PoseLabel, angle_between

DEG_90_RAD = math.pi / 2


@dataclass(frozen=True)
class RuleParams:
    plank_angle_threshold_deg: float = 165.0
    knee_tolerance_rad: float = 0.05 * math.pi
    weight_fraction_threshold: float = 0.8

    def __post_init__(self):
        if not 0 < self.plank_angle_threshold_deg < 180:
            raise ValueError("plank angle threshold must be in (0, 180) degrees")
        if not 0 < self.knee_tolerance_rad < math.pi / 2:
            raise ValueError("knee tolerance must be in (0, pi/2) radians")
        if not 0 < self.weight_fraction_threshold < 1:
            raise ValueError("weight fraction threshold must be in (0, 1)")


class ErrorCode(enum.Enum):
    HIPS_TOO_HIGH = "HIPS_TOO_HIGH"
    HIPS_TOO_LOW = "HIPS_TOO_LOW"
    KNEE_ANGLE_OFF = "KNEE_ANGLE_OFF"
    LEANING_TOO_FORWARD = "LEANING_TOO_FORWARD"
    LEANING_TOO_BACK = "LEANING_TOO_BACK"


ADVICE: dict[ErrorCode, str] = {
    ErrorCode.HIPS_TOO_HIGH: "Lower your hips: keep your back straight.",
    ErrorCode.HIPS_TOO_LOW: "Raise your hips: keep your back straight.",
    ErrorCode.KNEE_ANGLE_OFF: "Bend your knees to about 90 degrees.",
    ErrorCode.LEANING_TOO_FORWARD: "Shift your weight back onto your heels.",
    ErrorCode.LEANING_TOO_BACK: "Shift your weight slightly forward.",
}


@dataclass(frozen=True)
class Diagnosis:
    label: PoseLabel
    correct: bool
    errors: tuple[ErrorCode, ...]
    measurements: dict[str, float] = field(default_factory=dict)

    @property
    def advice(self) -> list[str]:
        return [ADVICE[code] for code in self.errors]

    def to_json_obj(self) -> dict:
        return {
            "label": self.label.value,
            "correct": self.correct,
            "errors": [code.value for code in self.errors],
            "measurements": dict(self.measurements),
            "advice": self.advice,
        }


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


_SIDE_CHAIN = {
    Side.LEFT: (model.L_SHOULDER, model.L_HIP, model.L_KNEE, model.L_ANKLE),
    Side.RIGHT: (model.R_SHOULDER, model.R_HIP, model.R_KNEE, model.R_ANKLE),
}


def select_profile_side(frame: PoseFrame) -> Side:
    """Side whose shoulder+hip+knee+ankle confidence sum is larger; ties
    go left."""
    left = sum(frame.kp(p).confidence for p in _SIDE_CHAIN[Side.LEFT])
    right = sum(frame.kp(p).confidence for p in _SIDE_CHAIN[Side.RIGHT])
    return Side.RIGHT if right > left else Side.LEFT


def _diag(label: PoseLabel, errors: list[ErrorCode],
          measurements: dict[str, float]) -> Diagnosis:
    return Diagnosis(label, not errors, tuple(errors), measurements)


def check_plank(frame: PoseFrame, params: RuleParams) -> Diagnosis:
    side = select_profile_side(frame)
    shoulder_p, hip_p, _, ankle_p = _SIDE_CHAIN[side]
    sx, sy = frame.point(shoulder_p)
    hx, hy = frame.point(hip_p)
    fx, fy = frame.point(ankle_p)

    back_angle = math.degrees(angle_between(sx - hx, sy - hy, fx - hx, fy - hy))
    measurements = {"back_angle_deg": back_angle}
    if back_angle > params.plank_angle_threshold_deg:
        return _diag(PoseLabel.PLANK, [], measurements)
    midpoint_y = (sy + fy) / 2.0
    # hip above the shoulder/ankle midpoint (smaller y) means hips high;
    # exact equality with a failed angle check counts as hips low
    code = ErrorCode.HIPS_TOO_HIGH if hy < midpoint_y else ErrorCode.HIPS_TOO_LOW
    return _diag(PoseLabel.PLANK, [code], measurements)


def check_squat(frame: PoseFrame, params: RuleParams,
                refined: PoseFrame | None = None) -> Diagnosis:
    measured = refined if refined is not None else frame
    side = select_profile_side(frame)
    _, hip_p, knee_p, ankle_p = _SIDE_CHAIN[side]
    hx, hy = measured.point(hip_p)
    kx, ky = measured.point(knee_p)
    fx, fy = measured.point(ankle_p)

    thigh_len = math.hypot(hx - kx, hy - ky)
    if thigh_len == 0.0:
        raise DegenerateThigh("hip and knee coincide")

    errors: list[ErrorCode] = []
    knee_angle = angle_between(hx - kx, hy - ky, fx - kx, fy - ky)
    if abs(knee_angle - DEG_90_RAD) > params.knee_tolerance_rad:
        errors.append(ErrorCode.KNEE_ANGLE_OFF)

    weight_fraction = abs(hx - fx) / thigh_len
    if weight_fraction <= params.weight_fraction_threshold:
        errors.append(ErrorCode.LEANING_TOO_FORWARD)
    elif weight_fraction >= 1.0:
        errors.append(ErrorCode.LEANING_TOO_BACK)

    return _diag(PoseLabel.SQUAT, errors,
                 {"knee_angle_rad": knee_angle,
                  "weight_fraction": weight_fraction})


def diagnose(frame: PoseFrame, match: MatchResult, params: RuleParams,
             use_refinement: bool = True) -> Diagnosis:
    """Dispatch to the matched pose's rule set.  For squats with
    refinement enabled, measurements run on the perspective-refined frame
    when the back quad is well conditioned; otherwise the raw frame is
    used (a near-profile view leaves the quad too thin to fit)."""
    if match.label is PoseLabel.PLANK:
        return check_plank(frame, params)
    refined = None
    if use_refinement and projection.refinable(frame):
        try:
            refined = projection.refine_frame(frame)
        except RankDeficient:
            refined = None
    return check_squat(frame, params, refined)
