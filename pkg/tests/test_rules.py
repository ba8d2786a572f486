"""Pose rules: boundary semantics, advice catalog, and dispatch."""

import math

import numpy as np
import pytest

from formcheck import model, projection, rules, synthetic
from formcheck.errors import DegenerateThigh, RankDeficient
from formcheck.matching import MatchResult
from formcheck.model import PoseLabel, angle_between, make_frame
from formcheck.rules import (ADVICE, Diagnosis, ErrorCode, RuleParams, Side,
                             check_plank, check_squat, diagnose,
                             select_profile_side)


def chain_frame(shoulder, hip, knee, ankle, right_conf=0.5):
    """Frame with an exact left-side profile chain; the right side clones
    the coordinates at lower confidence so the left side is measured."""
    pts = [(shoulder[0] + 5.0 * i, shoulder[1] - 40.0 - 2.0 * i, 1.0)
           for i in range(17)]  # benign head/arm filler
    frame = make_frame(pts, 640.0, 480.0)
    updates = {}
    for left, right, xy in ((model.L_SHOULDER, model.R_SHOULDER, shoulder),
                            (model.L_HIP, model.R_HIP, hip),
                            (model.L_KNEE, model.R_KNEE, knee),
                            (model.L_ANKLE, model.R_ANKLE, ankle)):
        updates[left] = model.Keypoint(left, *xy, 1.0)
        updates[right] = model.Keypoint(right, *xy, right_conf)
    return frame.with_keypoints(updates)


def measured_back_angle(shoulder, hip, ankle):
    return math.degrees(angle_between(shoulder[0] - hip[0], shoulder[1] - hip[1],
                                      ankle[0] - hip[0], ankle[1] - hip[1]))


def test_default_params_match_published_values():
    p = RuleParams()
    assert p.plank_angle_threshold_deg == 165.0
    assert p.knee_tolerance_rad == pytest.approx(0.05 * math.pi)
    assert p.weight_fraction_threshold == 0.8


def test_param_validation():
    with pytest.raises(ValueError):
        RuleParams(plank_angle_threshold_deg=180.0)
    with pytest.raises(ValueError):
        RuleParams(knee_tolerance_rad=math.pi)
    with pytest.raises(ValueError):
        RuleParams(weight_fraction_threshold=1.0)


def test_plank_threshold_is_strict():
    """A back angle exactly equal to the threshold is NOT correct."""
    shoulder, hip, ankle = (100.0, 260.0), (260.0, 200.0), (500.0, 140.0)
    frame = chain_frame(shoulder, hip, (380.0, 170.0), ankle)
    angle = measured_back_angle(shoulder, hip, ankle)

    at_boundary = RuleParams(plank_angle_threshold_deg=angle)
    diag = check_plank(frame, at_boundary)
    assert not diag.correct
    # hip y equals the shoulder/ankle midpoint y exactly -> counted low
    assert diag.errors == (ErrorCode.HIPS_TOO_LOW,)

    below = RuleParams(plank_angle_threshold_deg=math.nextafter(angle, 0.0))
    assert check_plank(frame, below).correct


def test_plank_hips_high_and_low():
    shoulder, ankle = (100.0, 260.0), (500.0, 140.0)  # midpoint y = 200
    high = chain_frame(shoulder, (260.0, 150.0), (380.0, 150.0), ankle)
    assert check_plank(high, RuleParams()).errors == (ErrorCode.HIPS_TOO_HIGH,)
    low = chain_frame(shoulder, (260.0, 250.0), (380.0, 200.0), ankle)
    assert check_plank(low, RuleParams()).errors == (ErrorCode.HIPS_TOO_LOW,)


def test_plank_correct_records_measurement():
    shoulder, hip, ankle = (100.0, 200.0), (300.0, 205.0), (500.0, 200.0)
    frame = chain_frame(shoulder, hip, (390.0, 202.0), ankle)
    diag = check_plank(frame, RuleParams())
    assert diag.correct
    assert diag.measurements["back_angle_deg"] == pytest.approx(
        measured_back_angle(shoulder, hip, ankle))


def test_knee_tolerance_is_inclusive():
    """Deviation exactly equal to the tolerance is still correct."""
    hip, knee, ankle = (300.0, 100.0), (300.0, 300.0), (480.0, 320.0)
    frame = chain_frame((310.0, 60.0), hip, knee, ankle)
    knee_angle = angle_between(hip[0] - knee[0], hip[1] - knee[1],
                               ankle[0] - knee[0], ankle[1] - knee[1])
    deviation = abs(knee_angle - math.pi / 2)
    assert deviation > 0

    at_boundary = RuleParams(knee_tolerance_rad=deviation)
    assert check_squat(frame, at_boundary).correct

    tighter = RuleParams(knee_tolerance_rad=math.nextafter(deviation, 0.0))
    assert check_squat(frame, tighter).errors == (ErrorCode.KNEE_ANGLE_OFF,)


def test_weight_fraction_lower_boundary_exact():
    """fraction == threshold counts as leaning forward (strict interval).
    Thigh length 100 (60-80-100 triangle) and hip-ankle offset 80 make the
    fraction exactly 0.8 in floating point."""
    frame = chain_frame((90.0, 40.0), (100.0, 100.0), (160.0, 180.0),
                        (180.0, 280.0))
    params = RuleParams(knee_tolerance_rad=1.4)  # isolate the weight check
    diag = check_squat(frame, params)
    assert diag.measurements["weight_fraction"] == 0.8
    assert diag.errors == (ErrorCode.LEANING_TOO_FORWARD,)


def test_weight_fraction_upper_boundary_exact():
    frame = chain_frame((90.0, 40.0), (100.0, 100.0), (160.0, 180.0),
                        (200.0, 280.0))
    params = RuleParams(knee_tolerance_rad=1.4)
    diag = check_squat(frame, params)
    assert diag.measurements["weight_fraction"] == 1.0
    assert diag.errors == (ErrorCode.LEANING_TOO_BACK,)


def test_weight_fraction_interior_is_correct():
    frame = chain_frame((90.0, 40.0), (100.0, 100.0), (160.0, 180.0),
                        (190.0, 280.0))
    diag = check_squat(frame, RuleParams(knee_tolerance_rad=1.4))
    assert diag.measurements["weight_fraction"] == pytest.approx(0.9)
    assert diag.correct


def test_squat_errors_accumulate():
    frame = chain_frame((90.0, 40.0), (100.0, 100.0), (160.0, 180.0),
                        (180.0, 280.0))
    diag = check_squat(frame, RuleParams())
    assert diag.errors == (ErrorCode.KNEE_ANGLE_OFF,
                           ErrorCode.LEANING_TOO_FORWARD)
    assert len(diag.advice) == 2


def test_degenerate_thigh():
    frame = chain_frame((90.0, 40.0), (100.0, 100.0), (100.0, 100.0),
                        (180.0, 280.0))
    with pytest.raises(DegenerateThigh):
        check_squat(frame, RuleParams())


def test_advice_catalog_is_verbatim():
    assert ADVICE[ErrorCode.HIPS_TOO_HIGH] == \
        "Lower your hips: keep your back straight."
    assert ADVICE[ErrorCode.HIPS_TOO_LOW] == \
        "Raise your hips: keep your back straight."
    assert ADVICE[ErrorCode.KNEE_ANGLE_OFF] == \
        "Bend your knees to about 90 degrees."
    assert ADVICE[ErrorCode.LEANING_TOO_FORWARD] == \
        "Shift your weight back onto your heels."
    assert ADVICE[ErrorCode.LEANING_TOO_BACK] == \
        "Shift your weight slightly forward."


def test_diagnosis_json_shape():
    diag = Diagnosis(PoseLabel.SQUAT, False,
                     (ErrorCode.KNEE_ANGLE_OFF,), {"knee_angle_rad": 1.2})
    obj = diag.to_json_obj()
    assert obj == {
        "label": "squat",
        "correct": False,
        "errors": ["KNEE_ANGLE_OFF"],
        "measurements": {"knee_angle_rad": 1.2},
        "advice": ["Bend your knees to about 90 degrees."],
    }


def test_profile_side_selection():
    frame = chain_frame((90.0, 40.0), (100.0, 100.0), (160.0, 180.0),
                        (190.0, 280.0), right_conf=0.5)
    assert select_profile_side(frame) is Side.LEFT
    boosted = chain_frame((90.0, 40.0), (100.0, 100.0), (160.0, 180.0),
                          (190.0, 280.0), right_conf=1.0)
    assert select_profile_side(boosted) is Side.LEFT  # tie goes left
    right = boosted.with_keypoints({
        model.L_HIP: model.Keypoint(model.L_HIP, 100.0, 100.0, 0.4)})
    assert select_profile_side(right) is Side.RIGHT


def test_diagnose_dispatches_on_match_label():
    plank, _ = synthetic.generate("plank", 1, 0.0, 8)[0]
    match = MatchResult(PoseLabel.PLANK, "x", 0.0, 0.0, 0.0)
    assert diagnose(plank, match, RuleParams()).label is PoseLabel.PLANK

    squat, _ = synthetic.generate("squat", 1, 0.0, 8)[0]
    match = MatchResult(PoseLabel.SQUAT, "x", 0.0, 0.0, 0.0)
    assert diagnose(squat, match, RuleParams()).label is PoseLabel.SQUAT


def test_diagnose_refinement_changes_rotated_measurements():
    scene = synthetic.squat_scene_3d(np.random.default_rng(13),
                                     rotation_deg=30.0)
    assert projection.refinable(scene.frame)
    match = MatchResult(PoseLabel.SQUAT, "x", 0.0, 0.0, 0.0)
    refined = diagnose(scene.frame, match, RuleParams(), use_refinement=True)
    raw = diagnose(scene.frame, match, RuleParams(), use_refinement=False)
    assert refined.measurements["knee_angle_rad"] != \
        pytest.approx(raw.measurements["knee_angle_rad"], abs=1e-6)
    # the refined measurement is closer to the true 3D knee angle
    assert abs(refined.measurements["knee_angle_rad"] - scene.knee_angle_3d) < \
        abs(raw.measurements["knee_angle_rad"] - scene.knee_angle_3d)


def test_diagnose_falls_back_when_fit_degenerates(monkeypatch):
    squat, _ = synthetic.generate("squat", 1, 0.0, 8)[0]
    monkeypatch.setattr(projection, "refinable", lambda frame: True)

    def explode(frame):
        raise RankDeficient("forced")

    monkeypatch.setattr(projection, "refine_frame", explode)
    match = MatchResult(PoseLabel.SQUAT, "x", 0.0, 0.0, 0.0)
    diag = diagnose(squat, match, RuleParams(), use_refinement=True)
    assert diag.label is PoseLabel.SQUAT  # raw-frame fallback, no raise
