/** Client-side session store: mirrors the step journal, keeps the latest
 * scene and fact list, and composes protocol messages for the interactive
 * operations (apply a tool to a selection, drag a free point, undo).
 *
 * The store never computes geometric truth itself: every displayed fact
 * comes from a get_facts response; a rejected request leaves both the
 * server session and this mirror untouched.
 */

import { ProtocolClient } from "./protocol.js";
import type {
  FactRecord,
  FailureReport,
  Response,
  SceneObject,
} from "./types.js";
import { isFailure } from "./types.js";

export interface StepEntry {
  text: string;
  goal: boolean;
}

export interface ApplyOutcome {
  ok: boolean;
  report?: FailureReport;
}

function reportOf(resp: Response): FailureReport | undefined {
  return isFailure(resp) ? resp.report : undefined;
}

export class SessionStore {
  readonly steps: StepEntry[] = [];
  scene: SceneObject[] = [];
  facts: FactRecord[] = [];

  constructor(private client: ProtocolClient) {}

  async loadTools(path: string | null = null): Promise<ApplyOutcome> {
    const resp = await this.client.request({ cmd: "load_tools", path });
    if (isFailure(resp)) return { ok: false, report: resp.report };
    this.steps.length = 0;
    await this.refresh();
    return { ok: true };
  }

  /** Replay a whole script, mirroring its lines into the journal. */
  async loadScript(text: string): Promise<ApplyOutcome> {
    const resp = await this.client.request({ cmd: "load_script", text });
    if (isFailure(resp)) return { ok: false, report: resp.report };
    this.steps.length = 0;
    for (const raw of text.split("\n")) {
      const line = raw.trim();
      if (!line || line.startsWith("#")) continue;
      this.steps.push({ text: line, goal: line.startsWith("?") });
    }
    await this.refresh();
    return { ok: true };
  }

  async applyStep(line: string): Promise<ApplyOutcome> {
    const resp = await this.client.request({ cmd: "apply_step", line });
    const report = reportOf(resp);
    if (report) return { ok: false, report };
    this.steps.push({ text: line.trim(), goal: line.trim().startsWith("?") });
    await this.refresh();
    return { ok: true };
  }

  /** Compose and apply a tool invocation from a scene selection. */
  async invokeTool(
    name: string,
    selection: SceneObject[],
    hypers: number[] = [],
  ): Promise<ApplyOutcome> {
    const args = selection.map((o) => {
      if (!o.labels.length) {
        throw new Error(`object #${o.id} has no label to address it by`);
      }
      return o.labels[0];
    });
    const line = `<- ${name} ${[...args, ...hypers].join(" ")}`.trimEnd();
    return this.applyStep(line);
  }

  /** Drag a free point; on rejection the previous scene stays in place and
   * the report names the violated step. */
  async dragPoint(label: string, x: number, y: number): Promise<ApplyOutcome> {
    const resp = await this.client.request({ cmd: "move_point", label, x, y });
    const report = reportOf(resp);
    if (report) return { ok: false, report };
    await this.refresh();
    return { ok: true };
  }

  /** Undo back to (and keep) the first `index` steps. */
  async undoTo(index: number): Promise<ApplyOutcome> {
    const k = this.steps.length - index;
    if (k < 0) throw new RangeError(`cannot undo to step ${index}`);
    const resp = await this.client.request({ cmd: "undo", k });
    const report = reportOf(resp);
    if (report) return { ok: false, report };
    this.steps.length = index;
    await this.refresh();
    return { ok: true };
  }

  async queryGoal(line: string): Promise<ApplyOutcome> {
    const resp = await this.client.request({ cmd: "query_goal", line });
    const report = reportOf(resp);
    return report ? { ok: false, report } : { ok: true };
  }

  async refresh(): Promise<void> {
    const scene = await this.client.request({ cmd: "get_scene" });
    if (scene.status === "scene") this.scene = scene.objects;
    const facts = await this.client.request({ cmd: "get_facts" });
    if (facts.status === "facts") this.facts = facts.facts;
  }

  /** The journal as a .gls script the batch checker accepts. */
  exportScript(): string {
    return this.steps.map((s) => s.text + "\n").join("");
  }
}
