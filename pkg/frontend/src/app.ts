/**
 * Browser entry point: wires a keypoint source, the service client,
 * the canvas overlay and the controls together.  The logic lives in
 * the other modules; this file is glue for a real page and is not
 * exercised by the Node test suite.
 */

import { ServiceClient } from "./client.js";
import { SessionControls } from "./controls.js";
import { DrawContext, Overlay } from "./overlay.js";
import { KeypointSource } from "./source.js";

export interface AppOptions {
  serviceUrl: string; // host:port of the analysis service
  canvas: { width: number; height: number; getContext(id: "2d"): unknown };
  source: KeypointSource;
}

export interface App {
  client: ServiceClient;
  overlay: Overlay;
  controls: SessionControls;
  stop(): void;
}

export async function startApp(options: AppOptions): Promise<App> {
  const ctx = options.canvas.getContext("2d") as DrawContext;
  const overlay = new Overlay(ctx, options.canvas.width, options.canvas.height);

  const client = new ServiceClient(
    options.serviceUrl,
    (url) => new WebSocket(url),
    { onDiagnosis: (msg) => overlay.setDiagnosis(msg) },
  );
  await client.connect();

  const controls = new SessionControls(client);
  options.source.start((frame) => {
    overlay.setFrame(frame);
    controls.observeFrame(frame);
    client.sendFrame(frame);
  });

  return {
    client,
    overlay,
    controls,
    stop: () => {
      options.source.stop();
      client.close();
    },
  };
}
