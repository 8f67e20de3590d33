/** Message and payload types of the NDJSON session protocol. */

export type ObjectKind = "P" | "L" | "C" | "A" | "D";

export interface PointValue {
  x: number;
  y: number;
}

export interface LineValue {
  nx: number;
  ny: number;
  c: number;
}

export interface CircleValue {
  cx: number;
  cy: number;
  r: number;
}

export interface ScalarValue {
  value: number;
}

export type ObjectValue = PointValue | LineValue | CircleValue | ScalarValue;

export interface SceneObject {
  id: number;
  kind: ObjectKind;
  labels: string[];
  value: ObjectValue;
}

export interface FactRecord {
  kind: string; // lies_on | eq_angle | eq_dist | eq_ratio | *_eq
  refs: number[];
  labels: string[];
  step: number | null;
  /** eq_angle only: per member, the two line ids the angle measures. */
  anchors?: Array<[number, number] | null>;
}

export interface FailureReport {
  step: number | null;
  tool: string | null;
  reason: string;
  labels: string[];
  message?: string;
  line?: number;
}

export type Request =
  | { cmd: "load_tools"; path: string | null }
  | { cmd: "load_script"; text: string }
  | { cmd: "apply_step"; line: string }
  | { cmd: "undo"; k: number }
  | { cmd: "move_point"; label: string; x: number; y: number }
  | { cmd: "query_goal"; line: string }
  | { cmd: "get_scene" }
  | { cmd: "get_facts" }
  | { cmd: "export" };

export type Response =
  | { status: "ok"; payload: Record<string, unknown> }
  | { status: "failure"; report: FailureReport }
  | { status: "scene"; objects: SceneObject[] }
  | { status: "facts"; facts: FactRecord[] };

export function isPoint(o: SceneObject): o is SceneObject & { value: PointValue } {
  return o.kind === "P";
}

export function isLine(o: SceneObject): o is SceneObject & { value: LineValue } {
  return o.kind === "L";
}

export function isCircle(o: SceneObject): o is SceneObject & { value: CircleValue } {
  return o.kind === "C";
}

export function isFailure(r: Response): r is Extract<Response, { status: "failure" }> {
  return r.status === "failure";
}
