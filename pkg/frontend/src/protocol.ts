// Telemetry protocol (schema version 1), mirroring docs/PROTOCOL.md.
// One JSON object per WebSocket text frame. Unknown fields are ignored on
// read; malformed frames decode to null and are dropped by the caller.

export const SCHEMA_VERSION = 1;

export type Vec3 = [number, number, number];

export interface SessionInfo {
  type: "session_info";
  seq: number;
  mode: string;
  target_depth: number;
  layer_boundaries: [number, number][];
  corridor_radius: number;
  distraction_interval: [number, number] | null;
  telemetry_rate: number;
}

export interface TickState {
  type: "tick_state";
  seq: number;
  t: number;
  w: number;
  abar: number;
  depth: number;
  haptic_x: Vec3;
  robot_x: Vec3;
  tip_task: Vec3;
  f_sensor: Vec3;
  f_fdbk: Vec3;
  f_operator: Vec3;
  gaze_object: string;
  gaze_point: Vec3;
  phase: string;
  status: "running" | "paused" | "complete";
}

export interface OperatorInput {
  type: "operator_input";
  seq: number;
  hand_force: Vec3;
  gaze_origin: Vec3;
  gaze_direction: Vec3;
  client_time: number;
}

export interface Control {
  type: "control";
  seq: number;
  action: "start" | "pause" | "reset" | "set_mode";
  mode?: string | null;
}

export type ServerMessage = SessionInfo | TickState;
export type ClientMessage = OperatorInput | Control;
export type Message = ServerMessage | ClientMessage;

const CONTROL_ACTIONS = new Set(["start", "pause", "reset", "set_mode"]);
const STATUSES = new Set(["running", "paused", "complete"]);

function isNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function asVec3(v: unknown): Vec3 | null {
  if (!Array.isArray(v) || v.length !== 3 || !v.every(isNumber)) return null;
  return [v[0], v[1], v[2]];
}

function num(v: unknown, fallback: number): number {
  return isNumber(v) ? v : fallback;
}

function str(v: unknown, fallback: string): string {
  return typeof v === "string" ? v : fallback;
}

/** Parse one incoming frame; null means "drop it and count an error". */
export function decode(frame: string): Message | null {
  let raw: unknown;
  try {
    raw = JSON.parse(frame);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) return null;
  const obj = raw as Record<string, unknown>;

  switch (obj.type) {
    case "session_info": {
      const layers: [number, number][] = [];
      if (Array.isArray(obj.layer_boundaries)) {
        for (const item of obj.layer_boundaries) {
          if (Array.isArray(item) && item.length === 2 && item.every(isNumber)) {
            layers.push([item[0], item[1]]);
          }
        }
      }
      let interval: [number, number] | null = null;
      if (
        Array.isArray(obj.distraction_interval) &&
        obj.distraction_interval.length === 2 &&
        obj.distraction_interval.every(isNumber)
      ) {
        interval = [obj.distraction_interval[0], obj.distraction_interval[1]];
      }
      return {
        type: "session_info",
        seq: num(obj.seq, 0),
        mode: str(obj.mode, "shared"),
        target_depth: num(obj.target_depth, 0.03),
        layer_boundaries: layers,
        corridor_radius: num(obj.corridor_radius, 0.0005),
        distraction_interval: interval,
        telemetry_rate: num(obj.telemetry_rate, 60),
      };
    }
    case "tick_state": {
      const vecs = {
        haptic_x: asVec3(obj.haptic_x ?? [0, 0, 0]),
        robot_x: asVec3(obj.robot_x ?? [0, 0, 0]),
        tip_task: asVec3(obj.tip_task ?? [0, 0, 0]),
        f_sensor: asVec3(obj.f_sensor ?? [0, 0, 0]),
        f_fdbk: asVec3(obj.f_fdbk ?? [0, 0, 0]),
        f_operator: asVec3(obj.f_operator ?? [0, 0, 0]),
        gaze_point: asVec3(obj.gaze_point ?? [0, 0, 0]),
      };
      if (Object.values(vecs).some((v) => v === null)) return null;
      const status = str(obj.status, "running");
      if (!STATUSES.has(status)) return null;
      return {
        type: "tick_state",
        seq: num(obj.seq, 0),
        t: num(obj.t, 0),
        w: num(obj.w, 0),
        abar: num(obj.abar, 0),
        depth: num(obj.depth, 0),
        haptic_x: vecs.haptic_x!,
        robot_x: vecs.robot_x!,
        tip_task: vecs.tip_task!,
        f_sensor: vecs.f_sensor!,
        f_fdbk: vecs.f_fdbk!,
        f_operator: vecs.f_operator!,
        gaze_object: str(obj.gaze_object, "background"),
        gaze_point: vecs.gaze_point!,
        phase: str(obj.phase, ""),
        status: status as TickState["status"],
      };
    }
    case "operator_input": {
      const hand = asVec3(obj.hand_force ?? [0, 0, 0]);
      const origin = asVec3(obj.gaze_origin ?? [0, 0, 0]);
      const dir = asVec3(obj.gaze_direction ?? [0, 1, 0]);
      if (!hand || !origin || !dir) return null;
      return {
        type: "operator_input",
        seq: num(obj.seq, 0),
        hand_force: hand,
        gaze_origin: origin,
        gaze_direction: dir,
        client_time: num(obj.client_time, 0),
      };
    }
    case "control": {
      const action = str(obj.action, "");
      if (!CONTROL_ACTIONS.has(action)) return null;
      return {
        type: "control",
        seq: num(obj.seq, 0),
        action: action as Control["action"],
        mode: typeof obj.mode === "string" ? obj.mode : null,
      };
    }
    default:
      return null;
  }
}

/** Serialize an outgoing message to one text frame. */
export function encode(msg: Message): string {
  const { type, ...rest } = msg as unknown as Record<string, unknown> & {
    type: string;
  };
  return JSON.stringify({ schema: SCHEMA_VERSION, type, ...rest });
}

/** Strictly increasing sequence numbers for one outbound stream. */
export class SequenceCounter {
  private next = 0;

  stamp<T extends Message>(msg: T): T {
    msg.seq = this.next;
    this.next += 1;
    return msg;
  }
}
