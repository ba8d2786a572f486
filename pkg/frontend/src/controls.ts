/**
 * Session controls: tune rule parameters / throttling on the live
 * websocket session and record the current frame into the exemplar
 * database.
 */

import { ServiceClient } from "./client.js";
import { PoseFrame, SessionConfig } from "./types.js";

export class SessionControls {
  private lastFrame: PoseFrame | null = null;

  constructor(private readonly client: ServiceClient) {}

  /** Track the most recent frame so it can be recorded on demand. */
  observeFrame(frame: PoseFrame): void {
    this.lastFrame = frame;
  }

  applyConfig(config: SessionConfig): void {
    this.client.sendConfig(config);
  }

  setMatchRatio(eaRatio: number): void {
    this.applyConfig({ ea_ratio: eaRatio });
  }

  setBannerInterval(ms: number): void {
    this.applyConfig({ min_interval_ms: ms });
  }

  /** Record the last seen frame as a labeled exemplar; resolves to the
   * new database size. */
  async recordExemplar(label: string, sourceId: string): Promise<number> {
    if (this.lastFrame === null) {
      throw new Error("no frame seen yet");
    }
    return this.client.addExemplar(this.lastFrame, label, sourceId);
  }
}
