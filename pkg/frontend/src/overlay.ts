/**
 * Skeleton overlay and advice banner.
 *
 * Rendering goes through a minimal 2D-context interface rather than
 * CanvasRenderingContext2D directly, so the overlay is testable under
 * Node with a recording fake and still works with a real canvas in the
 * browser (which satisfies the interface structurally).
 */

import { DiagnosisMessage, PoseFrame, SKELETON_EDGES } from "./types.js";

/** Subset of CanvasRenderingContext2D used by the overlay. */
export interface DrawContext {
  strokeStyle: string;
  fillStyle: string;
  lineWidth: number;
  font: string;
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
}

export interface OverlayStyle {
  edgeColor: string;
  keypointColor: string;
  /** Color for keypoints whose confidence is below lowConfidence. */
  lowConfidenceColor: string;
  lowConfidence: number;
  keypointRadius: number;
  bannerOkColor: string;
  bannerAdviceColor: string;
  bannerTextColor: string;
  bannerHeight: number;
}

export const DEFAULT_STYLE: OverlayStyle = {
  edgeColor: "#9e9e9e",
  keypointColor: "#1f77b4",
  lowConfidenceColor: "#ff7f0e",
  lowConfidence: 0.35,
  keypointRadius: 4,
  bannerOkColor: "#2e7d32",
  bannerAdviceColor: "#c62828",
  bannerTextColor: "#ffffff",
  bannerHeight: 28,
};

export interface BannerState {
  text: string;
  ok: boolean;
}

/** Banner text for a diagnosis: the first advice string when the form
 * is wrong, otherwise a positive confirmation with the pose name. */
export function bannerFor(diagnosis: DiagnosisMessage): BannerState {
  if (diagnosis.correct) {
    return { text: `Good ${diagnosis.label}!`, ok: true };
  }
  return { text: diagnosis.advice[0] ?? "Check your form.", ok: false };
}

export class Overlay {
  private banner: BannerState | null = null;
  private frame: PoseFrame | null = null;

  constructor(
    private readonly ctx: DrawContext,
    private readonly width: number,
    private readonly height: number,
    private readonly style: OverlayStyle = DEFAULT_STYLE,
  ) {}

  setFrame(frame: PoseFrame): void {
    this.frame = frame;
    this.render();
  }

  setDiagnosis(diagnosis: DiagnosisMessage): void {
    this.banner = bannerFor(diagnosis);
    this.render();
  }

  getBanner(): BannerState | null {
    return this.banner;
  }

  render(): void {
    const ctx = this.ctx;
    ctx.clearRect(0, 0, this.width, this.height);
    if (this.frame !== null) {
      this.drawSkeleton(this.frame);
    }
    if (this.banner !== null) {
      this.drawBanner(this.banner);
    }
  }

  private drawSkeleton(frame: PoseFrame): void {
    const ctx = this.ctx;
    const sx = this.width / frame.w;
    const sy = this.height / frame.h;

    ctx.strokeStyle = this.style.edgeColor;
    ctx.lineWidth = 2;
    for (const [a, b] of SKELETON_EDGES) {
      const [ax, ay, ac] = frame.kp[a];
      const [bx, by, bc] = frame.kp[b];
      if (ac === 0 || bc === 0) continue; // missing endpoints: no edge
      ctx.beginPath();
      ctx.moveTo(ax * sx, ay * sy);
      ctx.lineTo(bx * sx, by * sy);
      ctx.stroke();
    }

    for (const [x, y, conf] of frame.kp) {
      if (conf === 0) continue;
      ctx.fillStyle =
        conf < this.style.lowConfidence
          ? this.style.lowConfidenceColor
          : this.style.keypointColor;
      ctx.beginPath();
      ctx.arc(x * sx, y * sy, this.style.keypointRadius, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  private drawBanner(banner: BannerState): void {
    const ctx = this.ctx;
    ctx.fillStyle = banner.ok
      ? this.style.bannerOkColor
      : this.style.bannerAdviceColor;
    ctx.fillRect(0, 0, this.width, this.style.bannerHeight);
    ctx.fillStyle = this.style.bannerTextColor;
    ctx.font = "16px sans-serif";
    ctx.fillText(banner.text, 8, this.style.bannerHeight - 9);
  }
}
