"""Complete missing keypoints with heuristic anthropometry.

Three strategies, applied per missing part in precedence order
mirror_copy > line_extension > neighbor_average:

  - mirror_copy: a left/right pair with exactly one side missing gets the
    missing side reflected across the body midline (the vertical line
    through the mean x of the detected shoulder and hip keypoints);
  - line_extension: a missing ankle is placed by extending the hip->knee
    ray beyond the knee by the hip-knee length (same side);
  - neighbor_average: a missing nose is the midpoint of the two eyes.

Filled points carry confidence min(cap, source confidences) with a
default cap of 0.3, and origin=FILLED.  Passes repeat until no rule
makes progress; any part still missing then raises UnfillableFrame.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import model
from .errors import UnfillableFrame
from .model import Keypoint, Origin, PoseFrame

DEFAULT_CONFIDENCE_CAP = 0.3


class FillStrategy(enum.Enum):
    MIRROR_COPY = "mirror_copy"
    LINE_EXTENSION = "line_extension"
    NEIGHBOR_AVERAGE = "neighbor_average"


@dataclass(frozen=True)
class FillReport:
    filled_parts: tuple[int, ...] = ()
    strategy_used: dict[int, FillStrategy] = field(default_factory=dict)


_MIRROR_TWIN = {}
for _l, _r in model.SYMMETRIC_PAIRS:
    _MIRROR_TWIN[_l] = _r
    _MIRROR_TWIN[_r] = _l

_ANKLE_CHAIN = {
    model.L_ANKLE: (model.L_HIP, model.L_KNEE),
    model.R_ANKLE: (model.R_HIP, model.R_KNEE),
}


def body_midline_x(frame: PoseFrame) -> float | None:
    """Mean x of the detector-reported shoulder and hip keypoints."""
    xs = [
        frame.kp(p).x
        for p in (model.L_SHOULDER, model.R_SHOULDER, model.L_HIP, model.R_HIP)
        if not frame.kp(p).missing and frame.kp(p).origin is Origin.DETECTED
    ]
    if not xs:
        return None
    return sum(xs) / len(xs)


def shoulder_midpoint(frame: PoseFrame) -> tuple[float, float]:
    """Virtual neck: average of the two shoulders (not stored as a part)."""
    lx, ly = frame.point(model.L_SHOULDER)
    rx, ry = frame.point(model.R_SHOULDER)
    return ((lx + rx) / 2.0, (ly + ry) / 2.0)


def _clamp(v: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, v))


def _filled(frame: PoseFrame, part: int, x: float, y: float,
            sources: list[Keypoint], cap: float) -> Keypoint:
    conf = min([cap] + [kp.confidence for kp in sources])
    return Keypoint(part, _clamp(x, 0.0, frame.width),
                    _clamp(y, 0.0, frame.height), conf, Origin.FILLED)


def fill_missing(frame: PoseFrame,
                 confidence_cap: float = DEFAULT_CONFIDENCE_CAP
                 ) -> tuple[PoseFrame, FillReport]:
    """Return (completed frame, report).  Raises UnfillableFrame if any
    part cannot be synthesized.  Already-present points are untouched."""
    midline = body_midline_x(frame)
    strategies: dict[int, FillStrategy] = {}

    progress = True
    while progress:
        progress = False
        updates: dict[int, Keypoint] = {}
        for part in range(model.NUM_PARTS):
            if not frame.kp(part).missing:
                continue
            twin = _MIRROR_TWIN.get(part)
            if twin is not None and not frame.kp(twin).missing and midline is not None:
                src = frame.kp(twin)
                updates[part] = _filled(frame, part, 2.0 * midline - src.x,
                                        src.y, [src], confidence_cap)
                strategies[part] = FillStrategy.MIRROR_COPY
                continue
            chain = _ANKLE_CHAIN.get(part)
            if chain is not None:
                hip, knee = (frame.kp(p) for p in chain)
                if not hip.missing and not knee.missing:
                    updates[part] = _filled(
                        frame, part, 2.0 * knee.x - hip.x, 2.0 * knee.y - hip.y,
                        [hip, knee], confidence_cap)
                    strategies[part] = FillStrategy.LINE_EXTENSION
                    continue
            if part == model.NOSE:
                le, re = frame.kp(model.L_EYE), frame.kp(model.R_EYE)
                if not le.missing and not re.missing:
                    updates[part] = _filled(
                        frame, part, (le.x + re.x) / 2.0, (le.y + re.y) / 2.0,
                        [le, re], confidence_cap)
                    strategies[part] = FillStrategy.NEIGHBOR_AVERAGE
        if updates:
            frame = frame.with_keypoints(updates)
            progress = True

    still_missing = [p for p in range(model.NUM_PARTS) if frame.kp(p).missing]
    if still_missing:
        names = ", ".join(model.PART_NAMES[p] for p in still_missing)
        raise UnfillableFrame(f"cannot synthesize: {names}")

    return frame, FillReport(tuple(sorted(strategies)), strategies)
