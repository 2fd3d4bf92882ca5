/**
 * Canvas renderer: draws the wall (bars, cursor, HUD) from a RenderState.
 * Pure drawing; everything it shows comes out of SessionClient.render().
 */

import { RenderState } from "./client.js";
import { DEFAULT_DISPLAY, DisplayGeometry } from "./mapping.js";

export class WallRenderer {
  private readonly ctx: CanvasRenderingContext2D;

  constructor(private readonly canvas: HTMLCanvasElement,
              private readonly display: DisplayGeometry = DEFAULT_DISPLAY) {
    const ctx = canvas.getContext("2d");
    if (ctx === null) throw new Error("2d canvas context unavailable");
    this.ctx = ctx;
  }

  private sx(x: number): number {
    return (x / this.display.widthPx) * this.canvas.width;
  }

  private sy(y: number): number {
    return (y / this.display.heightPx) * this.canvas.height;
  }

  draw(state: RenderState): void {
    const { ctx, canvas } = this;
    ctx.fillStyle = "#101014";
    ctx.fillRect(0, 0, canvas.width, canvas.height);

    const stim = state.stimulus;
    if (stim !== null) {
      const halfW = this.sx(stim.width_px / 2);
      for (const side of ["left", "right"] as const) {
        const cx = this.sx(side === "left" ? stim.left_center_x
                                           : stim.right_center_x);
        const isTarget = stim.target === side;
        ctx.fillStyle = isTarget
          ? (state.flash ? "#d03030" : (stim.target_color ?? "green"))
          : (stim.other_color ?? "white");
        ctx.fillRect(cx - halfW, 0, 2 * halfW, canvas.height);
      }
    }

    if (state.cursor !== null) {
      const x = this.sx(state.cursor.x);
      const y = this.sy(state.cursor.y);
      ctx.strokeStyle = "#30b0ff";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.moveTo(x - 8, y);
      ctx.lineTo(x + 8, y);
      ctx.moveTo(x, y - 8);
      ctx.lineTo(x, y + 8);
      ctx.stroke();
    }

    ctx.fillStyle = "#e8e8e8";
    ctx.font = "13px system-ui, sans-serif";
    const stats = state.stats;
    const total = stats.hits + stats.misses;
    const acc = total === 0 ? "-" : `${(100 * stats.hits / total).toFixed(0)}%`;
    const lastRt = stats.rts.length
      ? `${stats.rts[stats.rts.length - 1].toFixed(2)} s` : "-";
    const mode = state.cursor?.mode ?? "-";
    ctx.fillText(
      `set ${stats.setIndex}  hits ${stats.hits}/${total || 0}  acc ${acc}  ` +
      `last RT ${lastRt}  mode ${mode}`, 10, 18);

    if (state.completed) {
      ctx.fillText("session complete", 10, 36);
    } else if (state.connection !== "open") {
      ctx.fillStyle = "#ffb020";
      ctx.fillRect(0, canvas.height - 26, canvas.width, 26);
      ctx.fillStyle = "#101014";
      ctx.fillText(`connection: ${state.connection} (session paused)`,
                   10, canvas.height - 8);
    }
  }
}
