"""Least-squares 2D<->3D perspective refinement and keypoint-space
multi-directional candidate handling.

The shoulders+hips quadrilateral ("back quad") is treated as the image
of a canonical 3D back rectangle.  Each 2D point is lifted with a
constant third coordinate of 1, and the 3x3 matrix T minimizing
||lift(quad) @ T - reference||^2 is solved via the normal equations.
Applying T to every lifted keypoint and dropping the third output
coordinate re-expresses the skeleton in the canonical back plane, which
undoes much of the view distortion before angles are measured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import model
from .errors import EmptyCandidates, MissingKeypoint, RankDeficient
from .features import confident_bbox
from .model import Keypoint, PoseFrame

# Canonical back rectangle (left shoulder, right shoulder, right hip,
# left hip) in the z=0 plane.
CANONICAL_BACK_REFERENCE = np.array([
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [1.0, 1.0, 0.0],
    [0.0, 1.0, 0.0],
])

_QUAD_PARTS = (model.L_SHOULDER, model.R_SHOULDER, model.R_HIP, model.L_HIP)

# Minimum shoulder-offset-to-back-length ratio for a trustworthy fit; a
# near-profile view collapses the quad to a sliver and the fit would
# only amplify detector noise.
MIN_QUAD_ASPECT = 0.05


@dataclass(frozen=True)
class BackQuad:
    """Left shoulder, right shoulder, right hip, left hip (cyclic)."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.points) != 4:
            raise ValueError("back quad needs exactly 4 points")

    @classmethod
    def from_frame(cls, frame: PoseFrame) -> "BackQuad":
        return cls(tuple(frame.point(p) for p in _QUAD_PARTS))

    def lifted(self) -> np.ndarray:
        """4x3 matrix of (x, y, 1) rows."""
        return np.array([[x, y, 1.0] for x, y in self.points])


@dataclass(frozen=True)
class ProjectionMatrix:
    matrix: np.ndarray  # 3x3

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Map Nx2 points through the lift and drop the third output."""
        lifted = np.column_stack([points, np.ones(len(points))])
        return (lifted @ self.matrix)[:, :2]


def _solve_3x3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting on the 3x3 normal
    system; a tiny pivot signals a rank-deficient quad."""
    a = a.astype(float).copy()
    b = b.astype(float).copy()
    scale = max(1.0, float(np.abs(a).max()))
    n = 3
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[pivot_row, col]) < 1e-10 * scale:
            raise RankDeficient("normal equations are singular")
        if pivot_row != col:
            a[[col, pivot_row]] = a[[pivot_row, col]]
            b[[col, pivot_row]] = b[[pivot_row, col]]
        for row in range(col + 1, n):
            factor = a[row, col] / a[col, col]
            a[row, col:] -= factor * a[col, col:]
            b[row] -= factor * b[col]
    x = np.zeros_like(b)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1:] @ x[row + 1:]) / a[row, row]
    return x


def _triangle_area(p: tuple[float, float], q: tuple[float, float],
                   r: tuple[float, float]) -> float:
    return 0.5 * abs((q[0] - p[0]) * (r[1] - p[1])
                     - (r[0] - p[0]) * (q[1] - p[1]))


def fit_projection(quad: BackQuad,
                   reference: np.ndarray = CANONICAL_BACK_REFERENCE
                   ) -> ProjectionMatrix:
    """Least-squares T with lift(quad) @ T ~= reference, via the normal
    equations.  Raises RankDeficient for collinear or repeated points."""
    pts = quad.points
    span = max(math.hypot(p[0] - q[0], p[1] - q[1])
               for p in pts for q in pts)
    if span == 0.0:
        raise RankDeficient("repeated quad points")
    for i in range(4):
        tri = [pts[j] for j in range(4) if j != i]
        if _triangle_area(*tri) < 1e-12 * span * span:
            raise RankDeficient("collinear quad points")
    # center and scale the quad before forming the normal equations;
    # raw pixel coordinates make the 3x3 system needlessly ill-conditioned
    arr = np.array(pts)
    mean = arr.mean(axis=0)
    norm_quad = BackQuad(tuple((float(x), float(y))
                               for x, y in (arr - mean) / span))
    lifted = norm_quad.lifted()
    t_norm = _solve_3x3(lifted.T @ lifted,
                        lifted.T @ np.asarray(reference, float))
    denorm = np.array([[1.0 / span, 0.0, 0.0],
                       [0.0, 1.0 / span, 0.0],
                       [-mean[0] / span, -mean[1] / span, 1.0]])
    return ProjectionMatrix(denorm @ t_norm)


# Canonical shoulder-span to back-length ratio used to estimate how far
# the view has turned away from a pure profile.
WIDTH_TO_BACK_RATIO = 0.92
_MAX_SIN_ROTATION = 0.85


def back_reference_for(quad: BackQuad) -> np.ndarray:
    """Reference 3D rectangle for a near-profile view of this quad.

    The left/right offset between the shoulder (and hip) pairs reveals
    how far the subject has rotated away from the camera's profile axis:
    offset ~= width * sin(rotation), back length is nearly unforeshortened.
    The reference rectangle is the observed quad with the foreshortened
    horizontal axis stretched back by 1/cos(rotation) and the canonical
    half-width as the depth coordinate, so the fitted map undoes the
    rotation's compression for every keypoint.
    """
    ls, rs, rh, lh = (np.array(p) for p in quad.points)
    offset = ((ls + lh) - (rs + rh)) / 2.0
    back = ((lh + rh) - (ls + rs)) / 2.0
    back_len = float(np.hypot(*back))
    if back_len == 0.0:
        raise RankDeficient("shoulders and hips coincide")
    sin_rot = min(_MAX_SIN_ROTATION,
                  float(np.hypot(*offset)) / (WIDTH_TO_BACK_RATIO * back_len))
    cos_rot = math.sqrt(1.0 - sin_rot * sin_rot)
    cx = float(np.mean([p[0] for p in quad.points]))
    half_width = WIDTH_TO_BACK_RATIO * back_len / 2.0
    rows = []
    for (x, y), z in zip(quad.points, (half_width, -half_width,
                                       -half_width, half_width)):
        rows.append([cx + (x - cx) / cos_rot, y, z])
    return np.array(rows)


def refine_frame(frame: PoseFrame) -> PoseFrame:
    """Undo the view rotation's horizontal compression via the back-quad
    fit, then rescale uniformly back into the original frame's confident
    bounding box (uniform scaling keeps angles intact).  Confidences,
    part order and rotation metadata are unchanged."""
    for p in _QUAD_PARTS:
        if frame.kp(p).missing:
            raise MissingKeypoint(model.PART_NAMES[p])
    quad = BackQuad.from_frame(frame)
    t = fit_projection(quad, back_reference_for(quad))

    coords = np.array([[kp.x, kp.y] for kp in frame.keypoints])
    refined = t.apply(coords)

    min_x, min_y, max_x, max_y = confident_bbox(frame)
    orig_diag = math.hypot(max_x - min_x, max_y - min_y)
    new_min = refined.min(axis=0)
    new_diag = float(np.hypot(*(refined.max(axis=0) - new_min)))
    if new_diag == 0.0 or orig_diag == 0.0:
        raise RankDeficient("refined skeleton collapsed to a point")
    scaled = (refined - new_min) * (orig_diag / new_diag) + np.array([min_x, min_y])

    kps = tuple(
        Keypoint(kp.part_id, float(scaled[i, 0]), float(scaled[i, 1]),
                 kp.confidence, kp.origin)
        for i, kp in enumerate(frame.keypoints)
    )
    return replace(frame, keypoints=kps)


def refinable(frame: PoseFrame, min_aspect: float = MIN_QUAD_ASPECT) -> bool:
    """True when shoulders and hips are present and the back quad is wide
    enough (relative to back length) for a stable fit."""
    if any(frame.kp(p).missing for p in _QUAD_PARTS):
        return False
    ls, rs, rh, lh = (frame.point(p) for p in _QUAD_PARTS)
    offset = (math.dist(ls, rs) + math.dist(lh, rh)) / 2.0
    back = (math.dist(ls, lh) + math.dist(rs, rh)) / 2.0
    if back == 0.0:
        return False
    return offset / back >= min_aspect


def rotate_frame_keypoints(frame: PoseFrame, degrees: int) -> PoseFrame:
    """Map detections made on an image rotated by `degrees` back through
    the keypoint-space rotation; 90 degrees sends (x, y) to (y, w - x)
    with the frame dimensions swapped."""
    if degrees not in (90, 180, 270):
        raise ValueError(f"rotation must be 90, 180 or 270, got {degrees}")
    out = frame
    for _ in range(degrees // 90):
        w = out.width
        kps = tuple(
            Keypoint(kp.part_id, kp.y, w - kp.x, kp.confidence, kp.origin)
            for kp in out.keypoints
        )
        out = replace(out, keypoints=kps, width=out.height, height=w)
    return replace(out, rotation_applied=(frame.rotation_applied + degrees) % 360)


def select_best_candidate(candidates: list[PoseFrame]) -> PoseFrame:
    """Most confident candidate (largest keypoint confidence sum); ties
    go to the earliest in the list."""
    if not candidates:
        raise EmptyCandidates("no candidate frames")
    best = candidates[0]
    best_sum = best.confidence_sum()
    for cand in candidates[1:]:
        s = cand.confidence_sum()
        if s > best_sum:
            best, best_sum = cand, s
    return best
