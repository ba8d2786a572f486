import { DrawContext } from "../src/overlay.js";
import { KeypointRow, NUM_PARTS, PoseFrame } from "../src/types.js";

/** Recording fake for the overlay's drawing interface. */
export class FakeContext implements DrawContext {
  strokeStyle = "";
  fillStyle = "";
  lineWidth = 0;
  font = "";
  calls: Array<{ op: string; args: unknown[]; style: string }> = [];

  private record(op: string, ...args: unknown[]): void {
    const style = op.startsWith("stroke") || op === "moveTo" || op === "lineTo"
      ? this.strokeStyle
      : this.fillStyle;
    this.calls.push({ op, args, style });
  }

  clearRect(x: number, y: number, w: number, h: number): void {
    this.record("clearRect", x, y, w, h);
  }
  beginPath(): void {
    this.record("beginPath");
  }
  moveTo(x: number, y: number): void {
    this.record("moveTo", x, y);
  }
  lineTo(x: number, y: number): void {
    this.record("lineTo", x, y);
  }
  stroke(): void {
    this.record("stroke");
  }
  arc(x: number, y: number, r: number, a0: number, a1: number): void {
    this.record("arc", x, y, r, a0, a1);
  }
  fill(): void {
    this.record("fill");
  }
  fillRect(x: number, y: number, w: number, h: number): void {
    this.record("fillRect", x, y, w, h);
  }
  fillText(text: string, x: number, y: number): void {
    this.record("fillText", text, x, y);
  }

  ops(op: string): Array<{ op: string; args: unknown[]; style: string }> {
    return this.calls.filter((c) => c.op === op);
  }
}

/** A full 17-part frame laid out on a diagonal, all confidences 1. */
export function gridFrame(t = 0, w = 640, h = 480): PoseFrame {
  const kp: KeypointRow[] = [];
  for (let i = 0; i < NUM_PARTS; i++) {
    kp.push([20 + i * 30, 20 + i * 25, 1.0]);
  }
  return { t, w, h, kp };
}
