/**
 * Wire types shared with the analysis service, plus the COCO-17
 * skeleton layout used for rendering.
 */

/** [x, y, confidence]; confidence 0 marks a missing keypoint. */
export type KeypointRow = [number, number, number];

export interface PoseFrame {
  t: number;
  w: number;
  h: number;
  kp: KeypointRow[];
}

export interface MatchInfo {
  label: string;
  distance: number;
  src: string;
}

export interface DiagnosisMessage {
  type: "diagnosis";
  label: string;
  correct: boolean;
  errors: string[];
  measurements: Record<string, number>;
  advice: string[];
  match: MatchInfo;
  t: number;
  db_version: number;
}

export interface ErrorMessage {
  type: "error";
  error: string;
  detail: string;
}

export type ServerMessage = DiagnosisMessage | ErrorMessage;

export interface SessionConfig {
  ea_ratio?: number;
  min_interval_ms?: number;
  params?: {
    plank_angle_threshold_deg?: number;
    knee_tolerance_rad?: number;
    weight_fraction_threshold?: number;
  };
}

export const NUM_PARTS = 17;

export const PART_NAMES = [
  "nose", "left_eye", "right_eye", "left_ear", "right_ear",
  "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
  "left_wrist", "right_wrist", "left_hip", "right_hip",
  "left_knee", "right_knee", "left_ankle", "right_ankle",
] as const;

/** Limb connections drawn by the overlay. */
export const SKELETON_EDGES: ReadonlyArray<readonly [number, number]> = [
  [0, 1], [0, 2], [1, 3], [2, 4],
  [5, 6], [5, 7], [7, 9], [6, 8], [8, 10],
  [5, 11], [6, 12], [11, 12],
  [11, 13], [13, 15], [12, 14], [14, 16],
];

export function isDiagnosis(msg: ServerMessage): msg is DiagnosisMessage {
  return msg.type === "diagnosis";
}

/** Basic structural check on an incoming frame record. */
export function isPoseFrame(value: unknown): value is PoseFrame {
  if (typeof value !== "object" || value === null) return false;
  const f = value as PoseFrame;
  return (
    typeof f.t === "number" &&
    typeof f.w === "number" &&
    typeof f.h === "number" &&
    Array.isArray(f.kp) &&
    f.kp.length === NUM_PARTS &&
    f.kp.every((row) => Array.isArray(row) && row.length === 3)
  );
}
