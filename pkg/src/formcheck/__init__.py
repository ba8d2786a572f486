"""Real-time exercise-form analysis from 2D pose keypoints.

Pipeline: fill missing keypoints -> normalize -> nearest-exemplar
classification (weighted coordinate + joint-angle distances) ->
pose-specific rule checks with correction advice.  Ships with a
streaming service, batch CLI, and a synthetic corpus generator used as
the test oracle.
"""

from .errors import FormcheckError
from .features import (AngleFeatureVector, RepresentationVector,
                       compute_angles, compute_representation,
                       normalize_frame)
from .filling import FillReport, FillStrategy, fill_missing
from .matching import (DEFAULT_EA_RATIO, MatchResult, PoseDatabase,
                       PoseExemplar, build_database, classify,
                       combined_distance, make_exemplar)
from .model import (Keypoint, Origin, PoseFrame, PoseLabel, make_frame,
                    NUM_PARTS, PART_NAMES, SKELETON_EDGES)
from .projection import refine_frame, refinable, rotate_frame_keypoints
from .rules import (ADVICE, Diagnosis, ErrorCode, RuleParams, check_plank,
                    check_squat, diagnose)

__version__ = "0.1.0"

__all__ = [
    "ADVICE", "AngleFeatureVector", "DEFAULT_EA_RATIO", "Diagnosis",
    "ErrorCode", "FillReport", "FillStrategy", "FormcheckError", "Keypoint",
    "MatchResult", "NUM_PARTS", "Origin", "PART_NAMES", "PoseDatabase",
    "PoseExemplar", "PoseFrame", "PoseLabel", "RepresentationVector",
    "RuleParams", "SKELETON_EDGES", "build_database", "check_plank",
    "check_squat", "classify", "combined_distance", "compute_angles",
    "compute_representation", "diagnose", "fill_missing", "make_exemplar",
    "make_frame", "normalize_frame", "refinable", "refine_frame",
    "rotate_frame_keypoints",
]
