/** Pure scene renderer: turns canonical objects plus fact records into
 * flat draw operations in screen coordinates.  Carriers are clipped to
 * the viewport; known facts become decorations -- equal-distance classes
 * share a tick count, equal-angle classes share an arc count, incidences
 * draw a small halo.  No geometry truth is decided here.
 */

import type {
  CircleValue,
  FactRecord,
  LineValue,
  PointValue,
  SceneObject,
} from "./types.js";
import { isCircle, isLine, isPoint } from "./types.js";

export interface Viewport {
  width: number;
  height: number;
  /** world center */
  cx: number;
  cy: number;
  /** pixels per world unit */
  scale: number;
}

export type DrawOp =
  | { op: "point"; x: number; y: number; label: string }
  | { op: "segment"; x1: number; y1: number; x2: number; y2: number }
  | { op: "circle"; cx: number; cy: number; r: number }
  | { op: "ticks"; x: number; y: number; angle: number; count: number }
  | { op: "arc"; cx: number; cy: number; r: number; start: number;
      end: number; count: number }
  | { op: "halo"; x: number; y: number };

export function worldToScreen(v: Viewport, x: number, y: number): [number, number] {
  return [v.width / 2 + (x - v.cx) * v.scale,
          v.height / 2 - (y - v.cy) * v.scale];
}

/** Viewport framing every point and circle with a relative margin. */
export function fitViewport(
  scene: SceneObject[], width: number, height: number, margin = 0.1,
): Viewport {
  let lo = [Infinity, Infinity];
  let hi = [-Infinity, -Infinity];
  const grow = (x: number, y: number) => {
    lo = [Math.min(lo[0], x), Math.min(lo[1], y)];
    hi = [Math.max(hi[0], x), Math.max(hi[1], y)];
  };
  for (const o of scene) {
    if (isPoint(o)) grow(o.value.x, o.value.y);
    else if (isCircle(o)) {
      grow(o.value.cx - o.value.r, o.value.cy - o.value.r);
      grow(o.value.cx + o.value.r, o.value.cy + o.value.r);
    }
  }
  if (lo[0] > hi[0]) return { width, height, cx: 0, cy: 0, scale: 1 };
  const spanX = Math.max(hi[0] - lo[0], 1e-9);
  const spanY = Math.max(hi[1] - lo[1], 1e-9);
  const scale = Math.min(width / (spanX * (1 + 2 * margin)),
                         height / (spanY * (1 + 2 * margin)));
  return { width, height, cx: (lo[0] + hi[0]) / 2, cy: (lo[1] + hi[1]) / 2,
           scale };
}

/** Clip the infinite line nx*x+ny*y=c to the world rectangle seen by the
 * viewport; null when it misses. */
export function clipLine(
  l: LineValue, v: Viewport,
): [number, number, number, number] | null {
  const halfW = v.width / 2 / v.scale;
  const halfH = v.height / 2 / v.scale;
  const xmin = v.cx - halfW, xmax = v.cx + halfW;
  const ymin = v.cy - halfH, ymax = v.cy + halfH;
  // parametric point on the line closest to the viewport center
  const d = l.nx * v.cx + l.ny * v.cy - l.c;
  const px = v.cx - d * l.nx;
  const py = v.cy - d * l.ny;
  const tx = -l.ny, ty = l.nx; // tangent
  let t0 = -Infinity, t1 = Infinity;
  // Liang-Barsky against each slab
  const slabs: Array<[number, number, number]> = [
    [tx, xmin - px, xmax - px],
    [ty, ymin - py, ymax - py],
  ];
  for (const [den, lod, hid] of slabs) {
    if (Math.abs(den) < 1e-12) {
      if (lod > 0 || hid < 0) return null;
      continue;
    }
    let a = lod / den, b = hid / den;
    if (a > b) [a, b] = [b, a];
    t0 = Math.max(t0, a);
    t1 = Math.min(t1, b);
    if (t0 > t1) return null;
  }
  return [px + t0 * tx, py + t0 * ty, px + t1 * tx, py + t1 * ty];
}

function lineIntersection(a: LineValue, b: LineValue): PointValue | null {
  const det = a.nx * b.ny - a.ny * b.nx;
  if (Math.abs(det) < 1e-9) return null;
  return { x: (a.c * b.ny - b.c * a.ny) / det,
           y: (a.nx * b.c - b.nx * a.c) / det };
}

export function renderScene(
  scene: SceneObject[], facts: FactRecord[], viewport: Viewport,
): DrawOp[] {
  const ops: DrawOp[] = [];
  const byId = new Map<number, SceneObject>();
  for (const o of scene) byId.set(o.id, o);

  for (const o of scene) {
    if (isLine(o)) {
      const seg = clipLine(o.value, viewport);
      if (seg) {
        const [x1, y1] = worldToScreen(viewport, seg[0], seg[1]);
        const [x2, y2] = worldToScreen(viewport, seg[2], seg[3]);
        ops.push({ op: "segment", x1, y1, x2, y2 });
      }
    } else if (isCircle(o)) {
      const [cx, cy] = worldToScreen(viewport, o.value.cx, o.value.cy);
      ops.push({ op: "circle", cx, cy, r: o.value.r * viewport.scale });
    }
  }
  // points over carriers
  for (const o of scene) {
    if (isPoint(o)) {
      const [x, y] = worldToScreen(viewport, o.value.x, o.value.y);
      ops.push({ op: "point", x, y, label: o.labels[0] ?? `#${o.id}` });
    }
  }

  let distClass = 0;
  let angleClass = 0;
  for (const fact of facts) {
    if (fact.kind === "eq_dist") {
      distClass += 1;
      for (let i = 0; i + 1 < fact.refs.length; i += 2) {
        const p = byId.get(fact.refs[i]);
        const q = byId.get(fact.refs[i + 1]);
        if (!p || !q || !isPoint(p) || !isPoint(q)) continue;
        const [x1, y1] = worldToScreen(viewport, p.value.x, p.value.y);
        const [x2, y2] = worldToScreen(viewport, q.value.x, q.value.y);
        ops.push({ op: "ticks", x: (x1 + x2) / 2, y: (y1 + y2) / 2,
                   angle: Math.atan2(y2 - y1, x2 - x1), count: distClass });
      }
    } else if (fact.kind === "eq_angle" && fact.anchors) {
      angleClass += 1;
      for (const anchor of fact.anchors) {
        if (!anchor) continue;
        const l0 = byId.get(anchor[0]);
        const l1 = byId.get(anchor[1]);
        if (!l0 || !l1 || !isLine(l0) || !isLine(l1)) continue;
        const vertex = lineIntersection(l0.value, l1.value);
        if (!vertex) continue;
        const [cx, cy] = worldToScreen(viewport, vertex.x, vertex.y);
        const dir = (l: LineValue) => {
          const [ax, ay] = worldToScreen(
            viewport, vertex.x - l.ny, vertex.y + l.nx);
          return Math.atan2(ay - cy, ax - cx);
        };
        const start = dir(l0.value);
        let end = dir(l1.value);
        // full angles live mod pi: sweep the short way from l0 to l1
        while (end - start > Math.PI / 2 + 1e-9) end -= Math.PI;
        while (start - end > Math.PI / 2 + 1e-9) end += Math.PI;
        ops.push({ op: "arc", cx, cy, r: 14, start, end, count: angleClass });
      }
    } else if (fact.kind === "lies_on") {
      const p = byId.get(fact.refs[0]);
      if (p && isPoint(p)) {
        const [x, y] = worldToScreen(viewport, p.value.x, p.value.y);
        ops.push({ op: "halo", x, y });
      }
    }
  }
  return ops;
}
