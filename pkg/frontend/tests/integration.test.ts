/**
 * Live end-to-end: spawn the Python session server, run a scripted operator
 * through the real wire protocol, and complete one seven-click set with one
 * deliberate miss. Asserts the red-flash event fires and that every cursor
 * position the UI rendered is exactly a server broadcast.
 */

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { SessionClient, Transport } from "../src/client.js";
import { VirtualController } from "../src/mapping.js";

const PORT = 18700 + Math.floor(Math.random() * 800);
let server: ChildProcess;

function nodeTransport(url: string): Transport {
  const ws = new WebSocket(url);
  return {
    send: (text) => ws.send(text),
    close: () => ws.close(),
    onMessage: (h) => ws.on("message", (data) => h(data.toString())),
    onClose: (h) => ws.on("close", () => h()),
    onOpen: (h) => ws.on("open", () => h()),
  };
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    const ok = await new Promise<boolean>((resolve) => {
      const probe = new WebSocket(`ws://127.0.0.1:${PORT}/echo`);
      probe.on("open", () => { probe.close(); resolve(true); });
      probe.on("error", () => resolve(false));
    });
    if (ok) return;
    await sleep(150);
  }
  throw new Error("server did not come up");
}

beforeAll(async () => {
  server = spawn("python3", ["-m", "farpoint.cli", "serve",
                             "--host", "127.0.0.1", "--port", String(PORT)],
                 { stdio: "ignore" });
  await waitForServer();
}, 30_000);

afterAll(() => {
  server?.kill();
});

describe("scripted live session", () => {
  it("completes a seven-click set over the wire, with one red-flash miss",
     async () => {
    const client = new SessionClient({
      serverUrl: `ws://127.0.0.1:${PORT}/ws`,
      sessionId: `it-${PORT}`,
      technique: "absolute",
      sets: [{ width_px: 100, amplitude_px: 3000 }],
      transportFactory: nodeTransport,
    });
    client.connect();
    const controller = new VirtualController();

    const renderedCursors: string[] = [];
    const flashesSeen: boolean[] = [];
    let missEvents = 0;
    let hitEvents = 0;
    let missedOnPurpose = false;

    const barX = (state: ReturnType<SessionClient["render"]>): number => {
      const stim = state.stimulus!;
      return stim.target === "left" ? stim.left_center_x : stim.right_center_x;
    };

    const deadline = Date.now() + 55_000;
    let pressCooldownUntil = 0;
    while (Date.now() < deadline) {
      const state = client.render();
      if (state.cursor !== null) {
        renderedCursors.push(JSON.stringify(state.cursor));
      }
      flashesSeen.push(state.flash);
      for (const ev of state.clickEvents) {
        if (ev.hit) hitEvents += 1;
        else missEvents += 1;
      }
      if (state.completed) break;
      if (state.stimulus !== null && state.connection === "open") {
        // after two hits, provoke exactly one miss by clicking the gap
        // between the bars; otherwise track the target bar
        const wantMiss = hitEvents === 2 && !missedOnPurpose;
        const aimX = wantMiss ? 3855 : barX(state);
        controller.aimAtPixel(aimX, 2175);
        client.sendPose(controller.poseMatrix());
        const c = state.cursor;
        if (c !== null && Date.now() > pressCooldownUntil
            && Math.abs(c.x - aimX) < (wantMiss ? 200 : 30)) {
          client.padPress();
          client.padRelease();
          pressCooldownUntil = Date.now() + 250;
          if (wantMiss) missedOnPurpose = true;
        }
      }
      await sleep(11);
    }

    const finalState = client.render();
    expect(finalState.completed).toBe(true);
    expect(hitEvents).toBe(7);
    expect(missEvents).toBeGreaterThanOrEqual(1);
    expect(flashesSeen.some(Boolean)).toBe(true);      // the red flash showed
    expect(finalState.stats.hits).toBe(7);

    // no local prediction: every cursor the UI rendered is verbatim one of
    // the server's cursor broadcasts
    const broadcast = new Set(client.cursorLog.map((c) => JSON.stringify(c)));
    expect(renderedCursors.length).toBeGreaterThan(50);
    for (const rendered of renderedCursors) {
      expect(broadcast.has(rendered)).toBe(true);
    }

    client.close();
  }, 60_000);
});
