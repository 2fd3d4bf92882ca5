/**
 * Virtual controller: turns relative mouse motion into aim angles and
 * builds the rigid pose matrices the wire protocol carries.
 *
 * The console cannot know where a real controller is, so it holds a fixed
 * stand position and lets pointer-lock mouse deltas steer yaw/pitch, like a
 * first-person camera. A touch region maps a patch of screen to trackpad
 * meters for the finger-driven techniques.
 */

export interface DisplayGeometry {
  widthPx: number;
  heightPx: number;
  widthM: number;
  heightM: number;
  /** room coordinates of the display's top-left corner; the surface is the
   * z = 0 plane with x right and y up */
  topLeft: [number, number, number];
}

export const DEFAULT_DISPLAY: DisplayGeometry = {
  widthPx: 7710, heightPx: 4350, widthM: 4.1, heightM: 2.31,
  topLeft: [-2.05, 2.61, 0.0],
};

export const DEFAULT_STAND: [number, number, number] = [0.0, 1.455, 2.0];

export interface ControllerMapping {
  degPerPxYaw: number;
  degPerPxPitch: number;
  metersPerPxTouch: number;   // mouse motion to finger motion while touching
  padTouchKey: string;        // hold to rest the finger on the pad
  padPressButton: number;     // mouse button index that clicks the pad
  triggerKey: string;
}

export const DEFAULT_MAPPING: ControllerMapping = {
  degPerPxYaw: 0.022,
  degPerPxPitch: 0.022,
  metersPerPxTouch: 0.0002,
  padTouchKey: "Shift",
  padPressButton: 0,
  triggerKey: "t",
};

export function validateMapping(m: ControllerMapping): string | null {
  if (m.degPerPxYaw <= 0 || m.degPerPxPitch <= 0) {
    return "sensitivity must be positive";
  }
  if (m.metersPerPxTouch <= 0) return "touch scale must be positive";
  if (m.padTouchKey === m.triggerKey) {
    return "pad-touch and trigger bindings conflict";
  }
  return null;
}

const DEG = Math.PI / 180.0;

export class VirtualController {
  yawDeg = 0.0;
  pitchDeg = 0.0;

  constructor(
    readonly mapping: ControllerMapping = DEFAULT_MAPPING,
    readonly stand: [number, number, number] = DEFAULT_STAND,
  ) {
    const err = validateMapping(mapping);
    if (err !== null) throw new Error(err);
  }

  /** Pointer-lock mouse deltas: right is +x, down is +y on the screen. */
  applyMouseDelta(dxPx: number, dyPx: number): void {
    // moving the mouse right should sweep the cursor right (-yaw), and
    // moving it down should sweep the cursor down (-pitch)
    this.yawDeg -= dxPx * this.mapping.degPerPxYaw;
    this.pitchDeg -= dyPx * this.mapping.degPerPxPitch;
    this.pitchDeg = Math.max(-80, Math.min(80, this.pitchDeg));
  }

  /**
   * Row-major 4x4 rigid transform with rotation Ry(yaw) * Rx(pitch); the
   * device's native forward axis is -z, so yaw 0 / pitch 0 aims at the wall.
   */
  poseMatrix(): number[] {
    const cy = Math.cos(this.yawDeg * DEG);
    const sy = Math.sin(this.yawDeg * DEG);
    const cp = Math.cos(this.pitchDeg * DEG);
    const sp = Math.sin(this.pitchDeg * DEG);
    const [px, py, pz] = this.stand;
    return [
      cy, sy * sp, sy * cp, px,
      0.0, cp, -sp, py,
      -sy, cy * sp, cy * cp, pz,
      0.0, 0.0, 0.0, 1.0,
    ];
  }

  /** Point the aim ray exactly at a display pixel (used by scripted runs). */
  aimAtPixel(x: number, y: number,
             display: DisplayGeometry = DEFAULT_DISPLAY): void {
    const [tlx, tly, tlz] = display.topLeft;
    const targetX = tlx + (x / display.widthPx) * display.widthM;
    const targetY = tly - (y / display.heightPx) * display.heightM;
    const dx = targetX - this.stand[0];
    const dy = targetY - this.stand[1];
    const dz = tlz - this.stand[2];
    const n = Math.hypot(dx, dy, dz);
    this.yawDeg = Math.atan2(-dx / n, -dz / n) / DEG;
    this.pitchDeg = Math.asin(dy / n) / DEG;
  }
}
