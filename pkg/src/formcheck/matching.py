"""Distance computation and nearest-neighbor pose classification.

Both distances weight by the TEST side's confidences only, so they are
deliberately asymmetric:

  euclidean: sum_k beta_k * (|x_Ak - x_Bk| + |y_Ak - y_Bk|) / sum_k beta_k
  angle:     sum_k gamma_k * |angle_Ak - angle_Bk| / sum_k gamma_k

The combined distance mixes them with the E-A ratio r:
(r * d_euclid + d_angle) / (r + 1), so values stay comparable across
ratio settings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import features as feats
from .errors import (BadFrame, DuplicateSource, EmptyDatabase, InvalidRatio,
                     ZeroConfidence)
from .features import AngleFeatureVector, RepresentationVector
from .model import NUM_PARTS, PoseFrame, PoseLabel

DEFAULT_EA_RATIO = 2.0
DB_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PoseExemplar:
    label: PoseLabel
    representation: RepresentationVector
    angle_features: AngleFeatureVector
    source_id: str

    def to_json_obj(self) -> dict:
        rep = self.representation
        return {
            "label": self.label.value,
            "rep": list(rep.coords) + list(rep.confidences) + [rep.confidence_sum],
            "ang": list(self.angle_features.angles),
            "angw": list(self.angle_features.weights),
            "src": self.source_id,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PoseExemplar":
        try:
            label = PoseLabel.parse(obj["label"])
            rep = [float(v) for v in obj["rep"]]
            ang = [float(v) for v in obj["ang"]]
            angw = [float(v) for v in obj["angw"]]
            src = str(obj["src"])
        except (KeyError, TypeError, ValueError) as exc:
            raise BadFrame(f"malformed exemplar: {exc}") from None
        if len(rep) != feats.REPRESENTATION_DIM:
            raise BadFrame(f"rep must have {feats.REPRESENTATION_DIM} elements")
        representation = RepresentationVector(
            tuple(rep[:2 * NUM_PARTS]),
            tuple(rep[2 * NUM_PARTS:2 * NUM_PARTS + NUM_PARTS]),
            rep[-1])
        angles = AngleFeatureVector(tuple(ang), tuple(angw))
        return cls(label, representation, angles, src)


@dataclass(frozen=True)
class MatchResult:
    label: PoseLabel
    best_source_id: str
    distance: float
    d_euclid: float
    d_angle: float


class PoseDatabase:
    """Immutable exemplar collection with stacked arrays for fast scans."""

    def __init__(self, exemplars: list[PoseExemplar],
                 ea_ratio: float = DEFAULT_EA_RATIO):
        if ea_ratio <= 0:
            raise InvalidRatio(f"ea_ratio must be > 0, got {ea_ratio}")
        seen = set()
        for ex in exemplars:
            if not ex.source_id:
                raise DuplicateSource("empty source_id")
            if ex.source_id in seen:
                raise DuplicateSource(ex.source_id)
            seen.add(ex.source_id)
        self.exemplars = tuple(exemplars)
        self.ea_ratio = float(ea_ratio)
        n = len(exemplars)
        self._coords = np.array([ex.representation.coords for ex in exemplars]
                                ).reshape(n, 2 * NUM_PARTS)
        self._angles = np.array([ex.angle_features.angles for ex in exemplars]
                                ).reshape(n, feats.NUM_ANGLES)

    def __len__(self) -> int:
        return len(self.exemplars)

    def label_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for ex in self.exemplars:
            counts[ex.label.value] = counts.get(ex.label.value, 0) + 1
        return counts

    def with_exemplar(self, exemplar: PoseExemplar) -> "PoseDatabase":
        """New database with one more exemplar (snapshot semantics)."""
        return PoseDatabase(list(self.exemplars) + [exemplar], self.ea_ratio)

    # -- persistence --

    def to_json_obj(self) -> dict:
        return {
            "schema": DB_SCHEMA_VERSION,
            "ea_ratio": self.ea_ratio,
            "exemplars": [ex.to_json_obj() for ex in self.exemplars],
        }

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_obj(), fh)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PoseDatabase":
        if obj.get("schema") != DB_SCHEMA_VERSION:
            raise BadFrame(f"unsupported database schema: {obj.get('schema')!r}")
        exemplars = [PoseExemplar.from_json_obj(e) for e in obj.get("exemplars", [])]
        return cls(exemplars, float(obj.get("ea_ratio", DEFAULT_EA_RATIO)))

    @classmethod
    def load(cls, path: str) -> "PoseDatabase":
        with open(path) as fh:
            return cls.from_json_obj(json.load(fh))


def euclidean_distance(test: RepresentationVector,
                       exemplar: RepresentationVector) -> float:
    """Confidence-weighted per-part L1 coordinate distance (weights from
    the test side)."""
    beta = np.array(test.confidences)
    denom = beta.sum()
    if denom <= 0:
        raise ZeroConfidence("all test confidences are zero")
    a = np.array(test.coords).reshape(NUM_PARTS, 2)
    b = np.array(exemplar.coords).reshape(NUM_PARTS, 2)
    per_part = np.abs(a - b).sum(axis=1)
    return float((beta * per_part).sum() / denom)


def angle_distance(test: AngleFeatureVector,
                   exemplar: AngleFeatureVector) -> float:
    """Confidence-weighted absolute angle difference (weights from the
    test side).  Angles live in [0, pi] so no wraparound is needed."""
    gamma = np.array(test.weights)
    denom = gamma.sum()
    if denom <= 0:
        raise ZeroConfidence("all test angle weights are zero")
    diff = np.abs(np.array(test.angles) - np.array(exemplar.angles))
    return float((gamma * diff).sum() / denom)


def combined_distance(d_e: float, d_a: float, ratio: float) -> float:
    if ratio <= 0:
        raise InvalidRatio(f"ratio must be > 0, got {ratio}")
    return (ratio * d_e + d_a) / (ratio + 1.0)


def frame_features(frame: PoseFrame) -> tuple[RepresentationVector,
                                              AngleFeatureVector]:
    """Normalize a filled frame and compute both feature vectors."""
    return feats.compute_features(frame)


def classify(frame: PoseFrame, db: PoseDatabase,
             ea_ratio: float | None = None) -> MatchResult:
    """Nearest exemplar by combined distance; ties break to the lowest
    exemplar index.  The frame must already be filled."""
    if len(db) == 0:
        raise EmptyDatabase("no exemplars")
    ratio = db.ea_ratio if ea_ratio is None else ea_ratio
    if ratio <= 0:
        raise InvalidRatio(f"ratio must be > 0, got {ratio}")
    rep, ang = frame_features(frame)

    beta = np.array(rep.confidences)
    beta_sum = beta.sum()
    if beta_sum <= 0:
        raise ZeroConfidence("all test confidences are zero")
    gamma = np.array(ang.weights)
    gamma_sum = gamma.sum()
    if gamma_sum <= 0:
        raise ZeroConfidence("all test angle weights are zero")

    coord_diff = np.abs(db._coords - np.array(rep.coords))
    per_part = coord_diff[:, 0::2] + coord_diff[:, 1::2]
    d_e = per_part @ beta / beta_sum
    d_a = np.abs(db._angles - np.array(ang.angles)) @ gamma / gamma_sum
    combined = (ratio * d_e + d_a) / (ratio + 1.0)

    best = int(np.argmin(combined))
    ex = db.exemplars[best]
    return MatchResult(ex.label, ex.source_id, float(combined[best]),
                       float(d_e[best]), float(d_a[best]))


def make_exemplar(frame: PoseFrame, label: PoseLabel,
                  source_id: str) -> PoseExemplar:
    rep, ang = frame_features(frame)
    return PoseExemplar(label, rep, ang, source_id)


def build_database(frames: list[tuple[PoseFrame, PoseLabel, str]],
                   ratio: float = DEFAULT_EA_RATIO,
                   skipped: list[tuple[str, str]] | None = None
                   ) -> PoseDatabase:
    """Precompute exemplar vectors; frames whose features fail are skipped
    (reported in `skipped` as (source_id, reason) if given).  An empty
    result raises EmptyDatabase."""
    exemplars: list[PoseExemplar] = []
    seen: set[str] = set()
    for frame, label, source_id in frames:
        if source_id in seen:
            raise DuplicateSource(source_id)
        seen.add(source_id)
        try:
            exemplars.append(make_exemplar(frame, label, source_id))
        except Exception as exc:  # per-frame feature errors are not fatal
            if skipped is not None:
                skipped.append((source_id, str(exc)))
    if not exemplars:
        raise EmptyDatabase("no valid exemplar frames")
    return PoseDatabase(exemplars, ratio)
