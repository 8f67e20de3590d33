/** End-to-end protocol tests against the real session service.  The
 * service is spawned as a subprocess; a scripted session replays the
 * bundled Simson construction step by step, exports it, and the exported
 * script must pass the batch checker. */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, test } from "vitest";

import { ProtocolClient } from "../src/protocol.js";
import { SessionStore } from "../src/session.js";
import { fitViewport, renderScene } from "../src/render.js";
import { toSvg } from "../src/svg.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const REPO = path.resolve(HERE, "..", "..");
const SIMSON = fs.readFileSync(path.join(REPO, "corpus", "simson.gls"), "utf-8");
const PYTHON = process.env.GEOPROVE_PYTHON ?? "python3";

let server: ChildProcess;
let port = 0;

function scriptLines(text: string): string[] {
  return text.split("\n").map((l) => l.trim())
    .filter((l) => l && !l.startsWith("#"));
}

beforeAll(async () => {
  server = spawn(PYTHON, ["-m", "geoprove.cli", "serve", "--port", "0"],
                 { cwd: REPO, stdio: ["ignore", "pipe", "inherit"] });
  port = await new Promise<number>((resolve, reject) => {
    const timer = setTimeout(
      () => reject(new Error("server did not start")), 60_000);
    server.stdout!.on("data", (chunk: Buffer) => {
      const m = chunk.toString().match(/listening on [\d.]+:(\d+)/);
      if (m) {
        clearTimeout(timer);
        resolve(Number(m[1]));
      }
    });
    server.on("exit", (code) => reject(new Error(`server exited: ${code}`)));
  });
}, 90_000);

afterAll(() => {
  server?.kill();
});

async function connect(): Promise<SessionStore> {
  const client = await ProtocolClient.connect(port);
  const store = new SessionStore(client);
  const loaded = await store.loadTools(null);
  expect(loaded.ok).toBe(true);
  return store;
}

describe("scripted Simson session over the protocol", () => {
  test("replay, facts, export round-trip", async () => {
    const session = await connect();
    for (const line of scriptLines(SIMSON)) {
      const outcome = await session.applyStep(line);
      expect(outcome.ok, `${line}: ${JSON.stringify(outcome.report)}`)
        .toBe(true);
    }
    // the collinearity fact is known to the kernel
    const collinear = session.facts.filter(
      (f) => f.kind === "lies_on" &&
        f.labels.length === 2 &&
        f.labels.includes("Fb") && f.labels.includes("d"));
    expect(collinear).toHaveLength(1);
    // merged foot lines render once
    const dLines = session.scene.filter((o) => o.labels.includes("d"));
    expect(dLines).toHaveLength(1);
    expect(dLines[0].labels).toContain("e");

    // export and feed the batch checker
    const exported = session.exportScript();
    const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "geoprove-"));
    const out = path.join(tmp, "exported.gls");
    fs.writeFileSync(out, exported);
    const check = spawnSync(PYTHON, ["-m", "geoprove.cli", "check", out],
                            { cwd: REPO, encoding: "utf-8" });
    expect(check.status, check.stderr).toBe(0);

    // an SVG snapshot of the final scene renders all object kinds
    const viewport = fitViewport(session.scene, 640, 480);
    const svg = toSvg(renderScene(session.scene, session.facts, viewport),
                      640, 480);
    expect(svg).toContain("carrier");
    expect(svg).toContain(">Fb</text>");
  }, 120_000);

  test("dragging a free point revalidates; violations are rejected", async () => {
    const session = await connect();
    const loaded = await session.loadScript(SIMSON);
    expect(loaded.ok).toBe(true);
    const sceneBefore = JSON.stringify(session.scene);

    // a margin-violating drag: A onto the midpoint of BC
    const rejected = await session.dragPoint(
      "A", (-126.97052001953125 + 108.5352783203125) / 2,
      (23.91351318359375 + 19.20867919921875) / 2);
    expect(rejected.ok).toBe(false);
    expect(rejected.report?.tool).toBe("circumcircle");
    await session.refresh();
    expect(JSON.stringify(session.scene)).toBe(sceneBefore);

    // a gentle drag keeps the proof alive
    const moved = await session.dragPoint("A", -75.2, -115.1);
    expect(moved.ok).toBe(true);
    const goal = await session.queryGoal("lies_on Fb d");
    expect(goal.ok).toBe(true);
  }, 120_000);

  test("undo to the pre-reasoning scene", async () => {
    const session = await connect();
    await session.loadScript(SIMSON);
    const undone = await session.undoTo(13);
    expect(undone.ok).toBe(true);
    expect(session.steps).toHaveLength(13);
    const goal = await session.queryGoal("lies_on Fb d");
    expect(goal.ok).toBe(false);
    expect(goal.report?.reason).toBe("UnknownFact");

    // invoke a reasoning tool from a scene selection
    const byLabel = (l: string) =>
      session.scene.find((o) => o.labels.includes(l))!;
    const applied = await session.invokeTool(
      "angles_to_concyclic",
      [byLabel("C"), byLabel("X"), byLabel("Fa"), byLabel("Fb")]);
    expect(applied.ok).toBe(true);
    expect(session.steps).toHaveLength(14);
    // equal-angle decorations carry anchors for the renderer
    const withAnchors = session.facts.filter(
      (f) => f.kind === "eq_angle" &&
        (f.anchors ?? []).some((a) => a !== null));
    expect(withAnchors.length).toBeGreaterThan(0);
  }, 120_000);

  test("wrong selection arity surfaces the failure report", async () => {
    const session = await connect();
    await session.applyStep("A <- free_point 0 0");
    await session.applyStep("B <- free_point 4 0");
    const bad = await session.invokeTool(
      "angles_to_concyclic",
      [session.scene[0], session.scene[1]]);
    expect(bad.ok).toBe(false);
    expect(bad.report?.reason).toContain("Unresolved");
  }, 60_000);
});
