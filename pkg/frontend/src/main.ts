/**
 * Browser wiring: pointer lock steers the virtual controller, keys and
 * mouse buttons drive the trackpad, and a requestAnimationFrame loop
 * renders whatever the server last broadcast.
 *
 * Controls: click the canvas to capture the mouse. Moving the mouse aims
 * the controller. Hold Shift to rest the finger on the trackpad (mouse
 * motion becomes finger motion), left mouse button presses the pad
 * (clicks), T pulls the trigger. Server and session come from the query
 * string: ?server=ws://host:port/ws&session=live&technique=dual_speed
 */

import { SessionClient, Transport } from "./client.js";
import { DEFAULT_MAPPING, VirtualController } from "./mapping.js";
import { WallRenderer } from "./render.js";

function browserTransport(url: string): Transport {
  const ws = new WebSocket(url);
  return {
    send: (text) => ws.send(text),
    close: () => ws.close(),
    onMessage: (h) => { ws.onmessage = (ev) => h(String(ev.data)); },
    onClose: (h) => { ws.onclose = () => h(); },
    onOpen: (h) => { ws.onopen = () => h(); },
  };
}

function param(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

export function start(): void {
  const canvas = document.getElementById("wall") as HTMLCanvasElement;
  const controller = new VirtualController();
  const client = new SessionClient({
    serverUrl: param("server", `ws://${window.location.hostname}:8787/ws`),
    sessionId: param("session", "console"),
    technique: param("technique", "dual_speed"),
    transportFactory: browserTransport,
  });
  client.connect();

  const renderer = new WallRenderer(canvas);
  let touching = false;
  let finger: [number, number] = [0, 0];

  canvas.addEventListener("click", () => canvas.requestPointerLock());

  window.addEventListener("mousemove", (ev) => {
    if (document.pointerLockElement !== canvas) return;
    if (touching) {
      finger = [finger[0] + ev.movementX * DEFAULT_MAPPING.metersPerPxTouch,
                finger[1] + ev.movementY * DEFAULT_MAPPING.metersPerPxTouch];
      client.touchMove(finger[0], finger[1]);
    } else {
      controller.applyMouseDelta(ev.movementX, ev.movementY);
    }
  });

  window.addEventListener("keydown", (ev) => {
    if (ev.repeat) return;
    if (ev.key === DEFAULT_MAPPING.padTouchKey && !touching) {
      touching = true;
      finger = [0, 0];
      client.touchDown(0, 0);
    } else if (ev.key.toLowerCase() === DEFAULT_MAPPING.triggerKey) {
      client.triggerPress();
    }
  });

  window.addEventListener("keyup", (ev) => {
    if (ev.key === DEFAULT_MAPPING.padTouchKey && touching) {
      touching = false;
      client.touchUp(finger[0], finger[1]);
    } else if (ev.key.toLowerCase() === DEFAULT_MAPPING.triggerKey) {
      client.triggerRelease();
    }
  });

  window.addEventListener("mousedown", (ev) => {
    if (document.pointerLockElement !== canvas) return;
    if (ev.button === DEFAULT_MAPPING.padPressButton) client.padPress();
  });
  window.addEventListener("mouseup", (ev) => {
    if (document.pointerLockElement !== canvas) return;
    if (ev.button === DEFAULT_MAPPING.padPressButton) client.padRelease();
  });

  const frame = (): void => {
    // event-driven: an unchanged aim emits nothing unless the server is
    // mid-animation (snap/clutch timers advance on incoming events)
    if (document.pointerLockElement === canvas) {
      client.maybeSendPose(controller.poseMatrix(), touching ? 1 : 0);
    }
    renderer.draw(client.render());
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  start();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", () => start());
}
