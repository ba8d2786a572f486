/**
 * Keypoint frame sources.  A source pushes PoseFrame records to a
 * callback at a configurable rate; the UI wires a source straight into
 * the service client.
 *
 * Kinds:
 *  - replay file: an array of frames (e.g. a recorded session or a
 *    generated corpus) played back in order,
 *  - mock generator: a caller-supplied frame factory, useful for demos
 *    and tests,
 *  - browser model: adapts a live pose-estimation callback (the browser
 *    bundle registers its model here; not used under Node).
 */

import { PoseFrame, isPoseFrame } from "./types.js";

export type FrameListener = (frame: PoseFrame) => void;
export type DoneListener = () => void;

export interface KeypointSource {
  /** Begin emitting frames.  Safe to call once per instance. */
  start(onFrame: FrameListener, onDone?: DoneListener): void;
  stop(): void;
}

export interface ReplayOptions {
  /** Frames per second; 0 or negative emits everything synchronously. */
  fps?: number;
  /** Rewrite timestamps to a 0-based sequence spaced by 1000/fps ms. */
  renumber?: boolean;
}

/** Parse replay-file contents: a JSON array of frames, or one frame
 * object per line.  Throws on records that are not pose frames. */
export function parseReplay(text: string): PoseFrame[] {
  const trimmed = text.trim();
  let records: unknown[];
  if (trimmed.startsWith("[")) {
    records = JSON.parse(trimmed) as unknown[];
  } else {
    records = trimmed
      .split("\n")
      .filter((line) => line.trim().length > 0)
      .map((line) => JSON.parse(line) as unknown);
  }
  return records.map((rec, i) => {
    if (!isPoseFrame(rec)) {
      throw new Error(`replay record ${i} is not a pose frame`);
    }
    return rec;
  });
}

export class ReplaySource implements KeypointSource {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;

  constructor(
    private readonly frames: PoseFrame[],
    private readonly options: ReplayOptions = {},
  ) {}

  start(onFrame: FrameListener, onDone?: DoneListener): void {
    const fps = this.options.fps ?? 0;
    const interval = fps > 0 ? 1000 / fps : 0;
    const frames = this.options.renumber
      ? this.frames.map((f, i) => ({ ...f, t: Math.round(i * (interval || 1)) }))
      : this.frames;

    if (interval <= 0) {
      for (const frame of frames) {
        if (this.stopped) return;
        onFrame(frame);
      }
      onDone?.();
      return;
    }

    let index = 0;
    const tick = () => {
      if (this.stopped) return;
      if (index >= frames.length) {
        this.timer = null;
        onDone?.();
        return;
      }
      onFrame(frames[index]);
      index += 1;
      this.timer = setTimeout(tick, interval);
    };
    tick();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }
}

export class MockGeneratorSource implements KeypointSource {
  private timer: ReturnType<typeof setInterval> | null = null;
  private index = 0;

  constructor(
    private readonly makeFrame: (index: number) => PoseFrame | null,
    private readonly fps: number = 10,
  ) {}

  start(onFrame: FrameListener, onDone?: DoneListener): void {
    const emit = () => {
      const frame = this.makeFrame(this.index);
      this.index += 1;
      if (frame === null) {
        this.stop();
        onDone?.();
        return;
      }
      onFrame(frame);
    };
    this.timer = setInterval(emit, Math.max(1, 1000 / this.fps));
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}

/** Bridge for a live in-browser pose model: the model calls `push` for
 * each estimated frame once the source has been started. */
export class BrowserModelSource implements KeypointSource {
  private listener: FrameListener | null = null;

  start(onFrame: FrameListener): void {
    this.listener = onFrame;
  }

  stop(): void {
    this.listener = null;
  }

  push(frame: PoseFrame): void {
    this.listener?.(frame);
  }
}
