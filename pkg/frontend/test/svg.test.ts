import { describe, expect, test } from "vitest";

import { toSvg } from "../src/svg.js";
import type { DrawOp } from "../src/render.js";

describe("toSvg", () => {
  test("empty scene is still a document", () => {
    const svg = toSvg([], 100, 50);
    expect(svg).toContain('<svg xmlns="http://www.w3.org/2000/svg"');
    expect(svg.trim().endsWith("</svg>")).toBe(true);
  });

  test("ops map to elements", () => {
    const ops: DrawOp[] = [
      { op: "segment", x1: 0, y1: 0, x2: 10, y2: 10 },
      { op: "circle", cx: 5, cy: 5, r: 3 },
      { op: "point", x: 1, y: 2, label: "A" },
      { op: "ticks", x: 5, y: 5, angle: 0, count: 2 },
      { op: "arc", cx: 5, cy: 5, r: 14, start: 0, end: 1, count: 3 },
      { op: "halo", x: 1, y: 2 },
    ];
    const svg = toSvg(ops, 100, 100);
    expect(svg).toContain('class="carrier"');
    expect(svg).toContain(">A</text>");
    expect((svg.match(/class="deco"/g) ?? []).length).toBe(2 + 3);
    expect(svg).toContain('class="halo"');
  });

  test("tick counts scale with the class index", () => {
    const one = toSvg([{ op: "ticks", x: 0, y: 0, angle: 0, count: 1 }], 10, 10);
    const three = toSvg([{ op: "ticks", x: 0, y: 0, angle: 0, count: 3 }], 10, 10);
    const lines = (s: string) => (s.match(/<line class="deco"/g) ?? []).length;
    expect(lines(one)).toBe(1);
    expect(lines(three)).toBe(3);
  });
});
