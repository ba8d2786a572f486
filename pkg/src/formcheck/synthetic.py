"""Synthetic skeleton corpora with embedded ground truth.

Frames are built from parameterized side-view skeletons (person facing
+x, image y down) whose key quantities (plank back angle, squat knee
angle and weight fraction) are hit exactly by construction, so the
ground-truth error codes come from the sampled targets rather than from
re-measuring the output.  A small left/right offset keeps the two body
sides distinct without suggesting an oblique view.

Also provides a 3D squat scene camera model (rotation about the
vertical axis + pinhole projection) for exercising the perspective
refinement at known ground-truth angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import model
from .model import PoseFrame, PoseLabel, make_frame
from .rules import ErrorCode, RuleParams

IMAGE_W, IMAGE_H = 640, 480
IMAGE_MARGIN = 40.0

# canonical limb lengths (dimensionless side-view units)
THIGH_LEN = 0.45
SHIN_LEN = 0.40
BACK_LEN = 0.50

# canonical offset applied to right-side parts so pairs stay distinct
RIGHT_OFFSET = (0.012, 0.006)

KINDS = ("plank", "squat", "plank_with_bent_knees")


@dataclass(frozen=True)
class GroundTruth:
    label: PoseLabel
    codes: tuple[ErrorCode, ...]
    regime: str
    targets: dict[str, float] = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "label": self.label.value,
            "codes": [c.value for c in self.codes],
            "regime": self.regime,
            "targets": dict(self.targets),
        }


def _head_and_arms(shoulder: tuple[float, float], facing: float,
                   arm_drop: float) -> dict[int, tuple[float, float]]:
    """Rough head/arm placement; facing=+1 means nose toward +x."""
    sx, sy = shoulder
    nose = (sx + facing * 0.13, sy - 0.10)
    return {
        model.NOSE: nose,
        model.L_EYE: (nose[0] - facing * 0.03, nose[1] - 0.04),
        model.R_EYE: (nose[0] - facing * 0.05, nose[1] - 0.045),
        model.L_EAR: (nose[0] - facing * 0.09, nose[1] - 0.02),
        model.R_EAR: (nose[0] - facing * 0.11, nose[1] - 0.025),
        model.L_ELBOW: (sx + facing * 0.10, sy + arm_drop * 0.55),
        model.L_WRIST: (sx + facing * 0.26, sy + arm_drop),
    }


def _assemble(points: dict[int, tuple[float, float]], rng: np.random.Generator,
              noise: float, timestamp_ms: int = 0) -> PoseFrame:
    """Mirror left-only parts to the right with a small offset, add noise,
    fit into the canonical image."""
    full = dict(points)
    for left, right in model.SYMMETRIC_PAIRS:
        if right not in full and left in full:
            lx, ly = full[left]
            full[right] = (lx + RIGHT_OFFSET[0], ly + RIGHT_OFFSET[1])
    coords = np.array([full[p] for p in range(model.NUM_PARTS)])

    if noise > 0:
        span = coords.max(axis=0) - coords.min(axis=0)
        diag = float(np.hypot(*span))
        coords = coords + rng.uniform(-noise * diag, noise * diag, coords.shape)

    # uniform fit into the image with a margin
    mins = coords.min(axis=0)
    span = coords.max(axis=0) - mins
    scale = min((IMAGE_W - 2 * IMAGE_MARGIN) / max(span[0], 1e-9),
                (IMAGE_H - 2 * IMAGE_MARGIN) / max(span[1], 1e-9))
    fitted = (coords - mins) * scale
    offset = np.array([(IMAGE_W - span[0] * scale) / 2.0,
                       (IMAGE_H - span[1] * scale) / 2.0])
    fitted += offset
    fitted[:, 0] = fitted[:, 0].clip(0.0, IMAGE_W)
    fitted[:, 1] = fitted[:, 1].clip(0.0, IMAGE_H)

    return make_frame([(float(x), float(y), 1.0) for x, y in fitted],
                      IMAGE_W, IMAGE_H, timestamp_ms)


# -- plank ----------------------------------------------------------------

def _plank_points(back_angle_rad: float, hips_up: bool,
                  bend_knee_rad: float | None = None
                  ) -> dict[int, tuple[float, float]]:
    """Shoulder at (0,0), ankle landing near (1.6, 0); the hip sits off
    the body line so the shoulder-hip-ankle angle equals the target."""
    shoulder = (0.0, 0.0)
    half = 0.8
    delta = half * math.tan((math.pi - back_angle_rad) / 2.0)
    hip = (half, -delta if hips_up else delta)
    leg_end = (2 * half, 0.0)

    leg_dir = np.array(leg_end) - np.array(hip)
    leg_dir = leg_dir / np.linalg.norm(leg_dir)
    knee = tuple(np.array(hip) + THIGH_LEN * leg_dir)
    if bend_knee_rad is None:
        ankle = tuple(np.array(knee) + SHIN_LEN * leg_dir)
    else:
        # rotate the knee->hip direction by the bend angle, shin pointing up
        ux, uy = -leg_dir
        c, s = math.cos(bend_knee_rad), math.sin(bend_knee_rad)
        shin = (ux * c + uy * s, -ux * s + uy * c)
        ankle = (knee[0] + SHIN_LEN * shin[0], knee[1] + SHIN_LEN * shin[1])

    points = {model.L_SHOULDER: shoulder, model.L_HIP: hip,
              model.L_KNEE: knee, model.L_ANKLE: ankle}
    points.update(_head_and_arms(shoulder, facing=-1.0, arm_drop=0.30))
    return points


def _plank_truth(regime: str, back_angle_rad: float,
                 targets: dict[str, float]) -> GroundTruth:
    codes = {
        "correct": (),
        "hips_high": (ErrorCode.HIPS_TOO_HIGH,),
        "hips_low": (ErrorCode.HIPS_TOO_LOW,),
    }[regime]
    targets = dict(targets, back_angle_deg=math.degrees(back_angle_rad))
    return GroundTruth(PoseLabel.PLANK, codes, regime, targets)


def plank_frame(rng: np.random.Generator, noise: float = 0.0,
                regime: str | None = None) -> tuple[PoseFrame, GroundTruth]:
    if regime is None:
        regime = rng.choice(["correct", "hips_high", "hips_low"],
                            p=[0.6, 0.2, 0.2])
    if regime == "correct":
        angle = math.radians(rng.uniform(172.0, 179.0))
        hips_up = bool(rng.integers(2))
    else:
        angle = math.radians(rng.uniform(140.0, 158.0))
        hips_up = regime == "hips_high"
    frame = _assemble(_plank_points(angle, hips_up), rng, noise)
    return frame, _plank_truth(regime, angle, {})


def bent_knee_plank_frame(rng: np.random.Generator, noise: float = 0.0
                          ) -> tuple[PoseFrame, GroundTruth]:
    """Piked plank whose local joint angles drift toward a squat's (folded
    hips, knees near 90 degrees, straight arms reaching for the floor)
    while the overall silhouette stays a ground-hugging plank shape.
    Mild pikes look like ordinary sloppy planks; deep ones are genuinely
    ambiguous for an angle-only matcher."""
    pike = math.radians(rng.uniform(90.0, 165.0))  # hip interior angle
    bend = math.radians(rng.uniform(78.0, 102.0))  # knee interior angle

    hip = np.array([0.8, 0.0])
    half = pike / 2.0
    # hip-angle bisector points straight down (image y grows downward)
    shoulder = hip + 0.8 * np.array([-math.sin(half), math.cos(half)])
    knee = hip + THIGH_LEN * np.array([math.sin(half), math.cos(half)])
    up = (hip - knee) / THIGH_LEN
    c, s = math.cos(bend), math.sin(bend)
    options = [(up[0] * c - up[1] * s, up[0] * s + up[1] * c),
               (up[0] * c + up[1] * s, -up[0] * s + up[1] * c)]
    shin = max(options, key=lambda d: d[1])  # fold the ankle floorward
    ankle = (knee[0] + SHIN_LEN * shin[0], knee[1] + SHIN_LEN * shin[1])

    points = {model.L_SHOULDER: tuple(shoulder), model.L_HIP: tuple(hip),
              model.L_KNEE: tuple(knee), model.L_ANKLE: ankle}
    points.update(_head_and_arms(tuple(shoulder), facing=-1.0, arm_drop=0.30))
    # arms straight down to the floor (hands planted under the shoulders)
    arm = np.array([-math.sin(half) * 0.2, math.cos(half)])
    arm = arm / np.linalg.norm(arm)
    points[model.L_ELBOW] = tuple(shoulder + 0.22 * arm)
    points[model.L_WRIST] = tuple(shoulder + 0.45 * arm)

    # ground truth codes derived from the piked geometry: the raised hips
    # shrink the measured back angle and trip the hip-height test
    params = RuleParams()
    s_pt, h_pt, f_pt = (np.array(points[p]) for p in
                        (model.L_SHOULDER, model.L_HIP, model.L_ANKLE))
    back = math.degrees(model.angle_between(*(s_pt - h_pt), *(f_pt - h_pt)))
    codes: tuple[ErrorCode, ...] = ()
    if back <= params.plank_angle_threshold_deg:
        high = h_pt[1] < (s_pt[1] + f_pt[1]) / 2.0
        codes = (ErrorCode.HIPS_TOO_HIGH if high else ErrorCode.HIPS_TOO_LOW,)
    truth = GroundTruth(PoseLabel.PLANK, codes, "bent_knee",
                        {"back_angle_deg": back,
                         "hip_pike_rad": pike,
                         "knee_bend_rad": bend})
    return _assemble(points, rng, noise), truth


# -- squat ----------------------------------------------------------------

def _solve_shin_tilt(knee_angle: float, fraction: float) -> float:
    """Shin tilt (from vertical) so the constructed squat hits the target
    knee angle and weight fraction exactly."""
    shift = math.pi / 2 - knee_angle

    def residual(psi: float) -> float:
        return (math.cos(psi - shift) - (SHIN_LEN / THIGH_LEN) * math.sin(psi)
                - fraction)

    lo, hi = -0.9, 1.2
    grid = np.linspace(lo, hi, 43)
    vals = [residual(g) for g in grid]
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            return float(grid[i])
        if vals[i] * vals[i + 1] < 0:
            return float(brentq(residual, grid[i], grid[i + 1]))
    raise ValueError(
        f"no squat geometry for knee={knee_angle:.3f}, fraction={fraction:.3f}")


def _squat_points(knee_angle: float, fraction: float
                  ) -> dict[int, tuple[float, float]]:
    psi = _solve_shin_tilt(knee_angle, fraction)
    phi = psi - (math.pi / 2 - knee_angle)  # thigh declination

    ankle = (0.55, 1.0)
    knee = (ankle[0] + SHIN_LEN * math.sin(psi),
            ankle[1] - SHIN_LEN * math.cos(psi))
    hip = (knee[0] - THIGH_LEN * math.cos(phi),
           knee[1] - THIGH_LEN * math.sin(phi))
    lean = 0.30
    shoulder = (hip[0] + BACK_LEN * math.sin(lean),
                hip[1] - BACK_LEN * math.cos(lean))

    points = {model.L_SHOULDER: shoulder, model.L_HIP: hip,
              model.L_KNEE: knee, model.L_ANKLE: ankle}
    points.update(_head_and_arms(shoulder, facing=1.0, arm_drop=0.08))
    # arms held out forward in a squat
    points[model.L_ELBOW] = (shoulder[0] + 0.20, shoulder[1] + 0.04)
    points[model.L_WRIST] = (shoulder[0] + 0.40, shoulder[1] + 0.05)
    return points


_SQUAT_REGIMES = ("correct", "knee_off", "lean_forward", "lean_back")


def squat_frame(rng: np.random.Generator, noise: float = 0.0,
                regime: str | None = None) -> tuple[PoseFrame, GroundTruth]:
    params = RuleParams()
    sigma = params.knee_tolerance_rad
    if regime is None:
        regime = rng.choice(_SQUAT_REGIMES, p=[0.55, 0.15, 0.15, 0.15])

    knee = math.pi / 2 + rng.uniform(-0.3, 0.3) * sigma
    fraction = rng.uniform(0.88, 0.93)
    codes: list[ErrorCode] = []
    if regime == "knee_off":
        sign = 1.0 if rng.integers(2) else -1.0
        knee = math.pi / 2 + sign * rng.uniform(2.0, 3.0) * sigma
        codes.append(ErrorCode.KNEE_ANGLE_OFF)
    elif regime == "lean_forward":
        fraction = rng.uniform(0.55, 0.70)
        codes.append(ErrorCode.LEANING_TOO_FORWARD)
    elif regime == "lean_back":
        fraction = rng.uniform(1.10, 1.18)
        codes.append(ErrorCode.LEANING_TOO_BACK)

    frame = _assemble(_squat_points(knee, fraction), rng, noise)
    truth = GroundTruth(PoseLabel.SQUAT, tuple(codes), regime,
                        {"knee_angle_rad": knee, "weight_fraction": fraction})
    return frame, truth


def generate(kind: str, n: int, noise: float, seed: int
             ) -> list[tuple[PoseFrame, GroundTruth]]:
    """Deterministic corpus of n frames of one kind."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")
    if n <= 0:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        if kind == "plank":
            frame, truth = plank_frame(rng, noise)
        elif kind == "squat":
            frame, truth = squat_frame(rng, noise)
        else:
            frame, truth = bent_knee_plank_frame(rng, noise)
        out.append((replace(frame, timestamp_ms=i), truth))
    return out


# -- 3D squat scene for the perspective refinement ------------------------

@dataclass(frozen=True)
class SquatScene:
    frame: PoseFrame
    knee_angle_3d: float
    rotation_deg: float


def squat_scene_3d(rng: np.random.Generator,
                   rotation_deg: float | None = None) -> SquatScene:
    """Squat built in 3D (side-view geometry extruded to left/right
    chains), rotated about the vertical axis and imaged with a pinhole
    camera.  Coordinates: x anterior, y down, z toward the subject's
    left; the unrotated camera looks along -z (a left profile view).
    The shoulder span tracks the back length closely so the refinement's
    canonical width-to-back ratio holds for these scenes."""
    if rotation_deg is None:
        rotation_deg = float(rng.uniform(5.0, 40.0))
    theta = math.radians(rotation_deg)

    knee_angle = math.pi / 2 + float(rng.uniform(-0.05, 0.05))
    fraction = float(rng.uniform(0.86, 0.95))
    back = float(rng.uniform(0.46, 0.52))
    width = 0.92 * back * float(rng.uniform(0.97, 1.03))
    lean = float(rng.uniform(0.25, 0.35))
    cam_dist = float(rng.uniform(10.0, 14.0))  # long-lens framing
    focal = 220.0 * cam_dist

    # sagittal chain (shared by both sides), scaled to this body's back
    sag = _squat_points(knee_angle, fraction)
    scale = back / BACK_LEN
    hip, knee, ankle, shoulder = (
        (sag[p][0] * scale, sag[p][1] * scale)
        for p in (model.L_HIP, model.L_KNEE, model.L_ANKLE, model.L_SHOULDER))

    half = width / 2.0
    pts3 = {}
    for side, z in ((0, +half), (1, -half)):  # 0 = left parts
        pts3[(model.L_HIP, model.R_HIP)[side]] = (*hip, z)
        pts3[(model.L_KNEE, model.R_KNEE)[side]] = (*knee, z)
        pts3[(model.L_ANKLE, model.R_ANKLE)[side]] = (*ankle, z)
        pts3[(model.L_SHOULDER, model.R_SHOULDER)[side]] = (*shoulder, z)
        pts3[(model.L_ELBOW, model.R_ELBOW)[side]] = (
            shoulder[0] + 0.20, shoulder[1] + 0.05, z * 0.9)
        pts3[(model.L_WRIST, model.R_WRIST)[side]] = (
            shoulder[0] + 0.40, shoulder[1] + 0.06, z * 0.9)
    nose = (shoulder[0] + 0.14, shoulder[1] - 0.10, 0.0)
    pts3[model.NOSE] = nose
    pts3[model.L_EYE] = (nose[0] - 0.02, nose[1] - 0.04, +0.03)
    pts3[model.R_EYE] = (nose[0] - 0.02, nose[1] - 0.04, -0.03)
    pts3[model.L_EAR] = (nose[0] - 0.09, nose[1] - 0.02, +0.07)
    pts3[model.R_EAR] = (nose[0] - 0.09, nose[1] - 0.02, -0.07)

    coords = np.array([pts3[p] for p in range(model.NUM_PARTS)])
    center = coords.mean(axis=0)
    rel = coords - center

    # rotate about the vertical (y) axis, then pinhole-project looking
    # along -z: depth toward the camera is +z after rotation
    c, s = math.cos(theta), math.sin(theta)
    x_r = rel[:, 0] * c + rel[:, 2] * s
    z_r = -rel[:, 0] * s + rel[:, 2] * c
    depth = cam_dist - z_r
    u = focal * x_r / depth + IMAGE_W / 2.0
    v = focal * rel[:, 1] / depth + IMAGE_H / 2.0
    u = u.clip(0.0, IMAGE_W)
    v = v.clip(0.0, IMAGE_H)

    frame = make_frame([(float(ux), float(vx), 1.0) for ux, vx in zip(u, v)],
                       IMAGE_W, IMAGE_H)
    return SquatScene(frame, knee_angle, rotation_deg)
