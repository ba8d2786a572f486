/**
 * Client for the form-analysis service: a websocket session for
 * streaming frames plus small HTTP helpers for health, database stats
 * and exemplar uploads.
 *
 * The websocket constructor is injectable so the same client runs in
 * the browser (native WebSocket) and under Node (the `ws` package
 * exposes a compatible class).
 */

import {
  DiagnosisMessage,
  ErrorMessage,
  PoseFrame,
  ServerMessage,
  SessionConfig,
} from "./types.js";

/** The minimal slice of the WebSocket API the client needs. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(
    type: "open" | "message" | "close" | "error",
    listener: (event: { data?: unknown }) => void,
  ): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientHandlers {
  onDiagnosis?: (msg: DiagnosisMessage) => void;
  onError?: (msg: ErrorMessage) => void;
  onClose?: () => void;
}

export class ServiceClient {
  private socket: SocketLike | null = null;

  constructor(
    private readonly baseUrl: string, // e.g. "127.0.0.1:8787"
    private readonly socketFactory: SocketFactory,
    private readonly handlers: ClientHandlers = {},
  ) {}

  /** Open the websocket session; resolves once the socket is open. */
  connect(): Promise<void> {
    return new Promise((resolve, reject) => {
      const socket = this.socketFactory(`ws://${this.baseUrl}/ws`);
      socket.addEventListener("open", () => resolve());
      socket.addEventListener("error", () =>
        reject(new Error(`cannot connect to ${this.baseUrl}`)),
      );
      socket.addEventListener("close", () => this.handlers.onClose?.());
      socket.addEventListener("message", (event) => {
        const msg = JSON.parse(String(event.data)) as ServerMessage;
        if (msg.type === "diagnosis") {
          this.handlers.onDiagnosis?.(msg);
        } else {
          this.handlers.onError?.(msg);
        }
      });
      this.socket = socket;
    });
  }

  sendFrame(frame: PoseFrame): void {
    this.requireSocket().send(JSON.stringify({ type: "frame", ...frame }));
  }

  sendConfig(config: SessionConfig): void {
    this.requireSocket().send(JSON.stringify({ type: "config", ...config }));
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
  }

  private requireSocket(): SocketLike {
    if (this.socket === null) {
      throw new Error("client is not connected");
    }
    return this.socket;
  }

  async health(): Promise<{ status: string; db_size: number }> {
    return this.getJson("/health");
  }

  async dbStats(): Promise<{
    size: number;
    labels: Record<string, number>;
    version: number;
    ea_ratio: number;
  }> {
    return this.getJson("/db/stats");
  }

  /** Upload a frame as a labeled exemplar; returns the new db size. */
  async addExemplar(
    frame: PoseFrame,
    label: string,
    sourceId: string,
  ): Promise<number> {
    const response = await fetch(`http://${this.baseUrl}/db/exemplar`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ frame, label, source_id: sourceId }),
    });
    const body = (await response.json()) as {
      db_size?: number;
      error?: string;
    };
    if (!response.ok) {
      throw new Error(body.error ?? `exemplar upload failed: ${response.status}`);
    }
    return body.db_size as number;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(`http://${this.baseUrl}${path}`);
    if (!response.ok) {
      throw new Error(`GET ${path} failed: ${response.status}`);
    }
    return (await response.json()) as T;
  }
}
