/** Draw operations onto a CanvasRenderingContext2D (browser adapter; the
 * geometry all happens in render.ts, this is plain painting). */

import type { DrawOp } from "./render.js";

export interface CanvasTheme {
  carrier: string;
  point: string;
  decoration: string;
  halo: string;
  background: string;
}

export const DEFAULT_THEME: CanvasTheme = {
  carrier: "#3565a8",
  point: "#222222",
  decoration: "#b03030",
  halo: "#4aa04a",
  background: "#ffffff",
};

export function paint(
  ctx: CanvasRenderingContext2D,
  ops: DrawOp[],
  width: number,
  height: number,
  theme: CanvasTheme = DEFAULT_THEME,
): void {
  ctx.fillStyle = theme.background;
  ctx.fillRect(0, 0, width, height);
  ctx.lineWidth = 1.2;
  ctx.font = "12px sans-serif";
  for (const op of ops) {
    switch (op.op) {
      case "segment":
        ctx.strokeStyle = theme.carrier;
        ctx.beginPath();
        ctx.moveTo(op.x1, op.y1);
        ctx.lineTo(op.x2, op.y2);
        ctx.stroke();
        break;
      case "circle":
        ctx.strokeStyle = theme.carrier;
        ctx.beginPath();
        ctx.arc(op.cx, op.cy, op.r, 0, 2 * Math.PI);
        ctx.stroke();
        break;
      case "point":
        ctx.fillStyle = theme.point;
        ctx.beginPath();
        ctx.arc(op.x, op.y, 2.5, 0, 2 * Math.PI);
        ctx.fill();
        ctx.fillText(op.label, op.x + 5, op.y - 5);
        break;
      case "ticks": {
        ctx.strokeStyle = theme.decoration;
        const nx = Math.cos(op.angle + Math.PI / 2);
        const ny = Math.sin(op.angle + Math.PI / 2);
        const tx = Math.cos(op.angle);
        const ty = Math.sin(op.angle);
        for (let i = 0; i < op.count; i++) {
          const off = (i - (op.count - 1) / 2) * 4;
          ctx.beginPath();
          ctx.moveTo(op.x + tx * off - 4 * nx, op.y + ty * off - 4 * ny);
          ctx.lineTo(op.x + tx * off + 4 * nx, op.y + ty * off + 4 * ny);
          ctx.stroke();
        }
        break;
      }
      case "arc":
        ctx.strokeStyle = theme.decoration;
        for (let i = 0; i < op.count; i++) {
          ctx.beginPath();
          ctx.arc(op.cx, op.cy, op.r + 4 * i, op.start, op.end,
                  op.end < op.start);
          ctx.stroke();
        }
        break;
      case "halo":
        ctx.strokeStyle = theme.halo;
        ctx.beginPath();
        ctx.arc(op.x, op.y, 5.5, 0, 2 * Math.PI);
        ctx.stroke();
        break;
    }
  }
}
