import { describe, expect, it } from "vitest";

import { MockGeneratorSource, ReplaySource, parseReplay } from "../src/source.js";
import { PoseFrame } from "../src/types.js";
import { gridFrame } from "./helpers.js";

describe("parseReplay", () => {
  it("parses a JSON array of frames", () => {
    const frames = [gridFrame(0), gridFrame(33)];
    expect(parseReplay(JSON.stringify(frames))).toEqual(frames);
  });

  it("parses one frame object per line", () => {
    const frames = [gridFrame(0), gridFrame(33), gridFrame(66)];
    const text = frames.map((f) => JSON.stringify(f)).join("\n") + "\n";
    expect(parseReplay(text)).toEqual(frames);
  });

  it("rejects records that are not pose frames", () => {
    expect(() => parseReplay('[{"t": 1}]')).toThrow(/record 0/);
  });
});

describe("ReplaySource", () => {
  it("emits all frames synchronously when unpaced", () => {
    const frames = [gridFrame(0), gridFrame(1), gridFrame(2)];
    const seen: PoseFrame[] = [];
    let done = false;
    new ReplaySource(frames).start((f) => seen.push(f), () => (done = true));
    expect(seen).toEqual(frames);
    expect(done).toBe(true);
  });

  it("paces emission at the requested fps and renumbers timestamps", async () => {
    const frames = [gridFrame(999), gridFrame(999), gridFrame(999)];
    const source = new ReplaySource(frames, { fps: 100, renumber: true });
    const seen: PoseFrame[] = [];
    const start = Date.now();
    await new Promise<void>((resolve) =>
      source.start((f) => seen.push(f), resolve),
    );
    const elapsed = Date.now() - start;
    expect(seen.map((f) => f.t)).toEqual([0, 10, 20]);
    expect(elapsed).toBeGreaterThanOrEqual(15); // at least two 10 ms gaps
  });

  it("stops emitting after stop()", async () => {
    const frames = Array.from({ length: 50 }, (_, i) => gridFrame(i));
    const source = new ReplaySource(frames, { fps: 200 });
    const seen: PoseFrame[] = [];
    source.start((f) => seen.push(f));
    await new Promise((r) => setTimeout(r, 30));
    source.stop();
    const count = seen.length;
    expect(count).toBeGreaterThan(0);
    expect(count).toBeLessThan(50);
    await new Promise((r) => setTimeout(r, 30));
    expect(seen.length).toBe(count);
  });
});

describe("MockGeneratorSource", () => {
  it("emits generated frames until the factory returns null", async () => {
    const source = new MockGeneratorSource(
      (i) => (i < 3 ? gridFrame(i) : null),
      200,
    );
    const seen: PoseFrame[] = [];
    await new Promise<void>((resolve) =>
      source.start((f) => seen.push(f), resolve),
    );
    expect(seen.map((f) => f.t)).toEqual([0, 1, 2]);
  });
});
