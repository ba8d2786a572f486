import { describe, expect, it } from "vitest";

import { DEFAULT_STYLE, Overlay, bannerFor } from "../src/overlay.js";
import { DiagnosisMessage, SKELETON_EDGES } from "../src/types.js";
import { FakeContext, gridFrame } from "./helpers.js";

function diagnosis(partial: Partial<DiagnosisMessage>): DiagnosisMessage {
  return {
    type: "diagnosis",
    label: "plank",
    correct: true,
    errors: [],
    measurements: {},
    advice: [],
    match: { label: "plank", distance: 0.1, src: "x" },
    t: 0,
    db_version: 1,
    ...partial,
  };
}

describe("bannerFor", () => {
  it("shows a positive banner with the pose name when correct", () => {
    expect(bannerFor(diagnosis({ label: "squat", correct: true }))).toEqual({
      text: "Good squat!",
      ok: true,
    });
  });

  it("shows the first advice string when wrong", () => {
    const msg = diagnosis({
      correct: false,
      errors: ["hips_too_high"],
      advice: ["Lower your hips: keep your back straight."],
    });
    expect(bannerFor(msg)).toEqual({
      text: "Lower your hips: keep your back straight.",
      ok: false,
    });
  });

  it("falls back to a generic message when advice is empty", () => {
    const msg = diagnosis({ correct: false, advice: [] });
    expect(bannerFor(msg).text).toBe("Check your form.");
  });
});

describe("Overlay skeleton drawing", () => {
  it("draws every edge and keypoint of a complete frame", () => {
    const ctx = new FakeContext();
    const overlay = new Overlay(ctx, 640, 480);
    overlay.setFrame(gridFrame());
    expect(ctx.ops("stroke")).toHaveLength(SKELETON_EDGES.length);
    expect(ctx.ops("arc")).toHaveLength(17);
    expect(ctx.ops("clearRect")).toHaveLength(1);
  });

  it("skips edges touching a missing keypoint but keeps the rest", () => {
    const ctx = new FakeContext();
    const overlay = new Overlay(ctx, 640, 480);
    const frame = gridFrame();
    frame.kp[0] = [0, 0, 0]; // nose missing: drops edges 0-1 and 0-2
    overlay.setFrame(frame);
    expect(ctx.ops("stroke")).toHaveLength(SKELETON_EDGES.length - 2);
    expect(ctx.ops("arc")).toHaveLength(16);
  });

  it("scales frame coordinates to the canvas size", () => {
    const ctx = new FakeContext();
    const overlay = new Overlay(ctx, 320, 240); // half of 640x480
    overlay.setFrame(gridFrame());
    const firstArc = ctx.ops("arc")[0];
    expect(firstArc.args[0]).toBeCloseTo(10); // 20 * 320/640
    expect(firstArc.args[1]).toBeCloseTo(10); // 20 * 240/480
  });

  it("colors low-confidence keypoints differently", () => {
    const ctx = new FakeContext();
    const overlay = new Overlay(ctx, 640, 480);
    const frame = gridFrame();
    frame.kp[3] = [110, 95, 0.2]; // below the low-confidence cutoff
    overlay.setFrame(frame);
    const fills = ctx.ops("fill").map((c) => c.style);
    expect(fills.filter((s) => s === DEFAULT_STYLE.lowConfidenceColor)).toHaveLength(1);
    expect(fills.filter((s) => s === DEFAULT_STYLE.keypointColor)).toHaveLength(16);
  });
});

describe("Overlay banner", () => {
  it("renders a green banner for a correct diagnosis", () => {
    const ctx = new FakeContext();
    const overlay = new Overlay(ctx, 640, 480);
    overlay.setDiagnosis(diagnosis({ correct: true }));
    const rect = ctx.ops("fillRect")[0];
    expect(rect.style).toBe(DEFAULT_STYLE.bannerOkColor);
    const text = ctx.ops("fillText")[0];
    expect(text.args[0]).toBe("Good plank!");
  });

  it("renders a red banner with the advice string when wrong", () => {
    const ctx = new FakeContext();
    const overlay = new Overlay(ctx, 640, 480);
    overlay.setDiagnosis(
      diagnosis({
        correct: false,
        errors: ["knee_angle_off"],
        advice: ["Bend your knees to about 90 degrees."],
      }),
    );
    expect(ctx.ops("fillRect")[0].style).toBe(DEFAULT_STYLE.bannerAdviceColor);
    expect(ctx.ops("fillText")[0].args[0]).toBe(
      "Bend your knees to about 90 degrees.",
    );
    expect(overlay.getBanner()).toEqual({
      text: "Bend your knees to about 90 degrees.",
      ok: false,
    });
  });

  it("keeps the banner when a new frame arrives", () => {
    const ctx = new FakeContext();
    const overlay = new Overlay(ctx, 640, 480);
    overlay.setDiagnosis(diagnosis({ correct: true }));
    overlay.setFrame(gridFrame(1));
    const texts = ctx.ops("fillText");
    expect(texts[texts.length - 1].args[0]).toBe("Good plank!");
  });
});
