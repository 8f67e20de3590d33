/** Serialize draw operations to a standalone SVG document. */

import type { DrawOp } from "./render.js";

const STYLE = `
  .carrier { stroke: #3565a8; stroke-width: 1.2; fill: none; }
  .pt { fill: #222; }
  .pt-label { font: 12px sans-serif; fill: #222; }
  .deco { stroke: #b03030; stroke-width: 1.1; fill: none; }
  .halo { stroke: #4aa04a; fill: none; stroke-width: 1; }
`;

function fmt(n: number): string {
  return Number.isInteger(n) ? String(n) : n.toFixed(2);
}

function arcPath(cx: number, cy: number, r: number,
                 start: number, end: number): string {
  const x0 = cx + r * Math.cos(start);
  const y0 = cy + r * Math.sin(start);
  const x1 = cx + r * Math.cos(end);
  const y1 = cy + r * Math.sin(end);
  const large = Math.abs(end - start) > Math.PI ? 1 : 0;
  const sweep = end > start ? 1 : 0;
  return `M ${fmt(x0)} ${fmt(y0)} A ${fmt(r)} ${fmt(r)} 0 ${large} ${sweep} ${fmt(x1)} ${fmt(y1)}`;
}

export function toSvg(ops: DrawOp[], width: number, height: number): string {
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
             `height="${height}" viewBox="0 0 ${width} ${height}">`);
  parts.push(`<style>${STYLE}</style>`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  for (const op of ops) {
    switch (op.op) {
      case "segment":
        parts.push(`<line class="carrier" x1="${fmt(op.x1)}" y1="${fmt(op.y1)}" ` +
                   `x2="${fmt(op.x2)}" y2="${fmt(op.y2)}"/>`);
        break;
      case "circle":
        parts.push(`<circle class="carrier" cx="${fmt(op.cx)}" ` +
                   `cy="${fmt(op.cy)}" r="${fmt(op.r)}"/>`);
        break;
      case "point":
        parts.push(`<circle class="pt" cx="${fmt(op.x)}" cy="${fmt(op.y)}" r="2.5"/>`);
        parts.push(`<text class="pt-label" x="${fmt(op.x + 5)}" ` +
                   `y="${fmt(op.y - 5)}">${op.label}</text>`);
        break;
      case "ticks": {
        // short strokes across the segment midpoint, count per class
        const [nx, ny] = [Math.cos(op.angle + Math.PI / 2),
                          Math.sin(op.angle + Math.PI / 2)];
        const [tx, ty] = [Math.cos(op.angle), Math.sin(op.angle)];
        for (let i = 0; i < op.count; i++) {
          const off = (i - (op.count - 1) / 2) * 4;
          const mx = op.x + tx * off;
          const my = op.y + ty * off;
          parts.push(`<line class="deco" x1="${fmt(mx - 4 * nx)}" ` +
                     `y1="${fmt(my - 4 * ny)}" x2="${fmt(mx + 4 * nx)}" ` +
                     `y2="${fmt(my + 4 * ny)}"/>`);
        }
        break;
      }
      case "arc":
        for (let i = 0; i < op.count; i++) {
          parts.push(`<path class="deco" d="${arcPath(op.cx, op.cy, op.r + 4 * i, op.start, op.end)}"/>`);
        }
        break;
      case "halo":
        parts.push(`<circle class="halo" cx="${fmt(op.x)}" cy="${fmt(op.y)}" r="5.5"/>`);
        break;
    }
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
