// Codec contracts, including conformance against frames produced by the
// simulator's own encoder (frozen samples below).

import { describe, expect, it } from "vitest";
import {
  decode,
  encode,
  SequenceCounter,
  type Control,
  type OperatorInput,
  type SessionInfo,
  type TickState,
} from "../src/protocol.js";

// Verbatim frames emitted by the server-side encoder.
const SERVER_SESSION_INFO =
  '{"schema":1,"type":"session_info","seq":0,"mode":"shared","target_depth":0.03,"layer_boundaries":[[0.0,0.004],[0.004,0.03]],"corridor_radius":0.0005,"distraction_interval":null,"telemetry_rate":60.0}';
const SERVER_TICK_STATE =
  '{"schema":1,"type":"tick_state","seq":12,"t":1.251,"w":0.5,"abar":0.73,"depth":0.0041,"haptic_x":[0.0,0.0,0.0123],"robot_x":[0.55,0.17,0.61],"tip_task":[0.0001,0.0,0.0041],"f_sensor":[0.0,0.0,-0.0008],"f_fdbk":[0.0,0.0,-0.0004],"f_operator":[0.0,0.0,0.11],"gaze_object":"drill","gaze_point":[0.001,0.0,-0.028],"phase":"live","status":"running"}';
const SERVER_CONTROL =
  '{"schema":1,"type":"control","seq":2,"action":"set_mode","mode":"full_robot"}';
const SERVER_OPERATOR_INPUT =
  '{"schema":1,"type":"operator_input","seq":9,"hand_force":[0.0,0.0,1.5],"gaze_origin":[0.0,-0.5,-0.15],"gaze_direction":[0.0,0.93,0.36],"client_time":1723280000.25}';

describe("decoding server-encoded frames", () => {
  it("parses session_info", () => {
    const msg = decode(SERVER_SESSION_INFO) as SessionInfo;
    expect(msg.type).toBe("session_info");
    expect(msg.target_depth).toBeCloseTo(0.03, 12);
    expect(msg.layer_boundaries).toEqual([[0, 0.004], [0.004, 0.03]]);
    expect(msg.distraction_interval).toBeNull();
  });

  it("parses tick_state", () => {
    const msg = decode(SERVER_TICK_STATE) as TickState;
    expect(msg.type).toBe("tick_state");
    expect(msg.seq).toBe(12);
    expect(msg.w).toBe(0.5);
    expect(msg.tip_task).toEqual([0.0001, 0, 0.0041]);
    expect(msg.status).toBe("running");
  });

  it("parses control and operator_input", () => {
    const ctl = decode(SERVER_CONTROL) as Control;
    expect(ctl.action).toBe("set_mode");
    expect(ctl.mode).toBe("full_robot");
    const inp = decode(SERVER_OPERATOR_INPUT) as OperatorInput;
    expect(inp.hand_force).toEqual([0, 0, 1.5]);
    expect(inp.client_time).toBeCloseTo(1723280000.25, 6);
  });

  it("round-trips through the client encoder and back", () => {
    for (const frame of [SERVER_CONTROL, SERVER_OPERATOR_INPUT]) {
      const msg = decode(frame)!;
      const again = decode(encode(msg));
      expect(again).toEqual(msg);
    }
  });
});

describe("robustness", () => {
  it("ignores unknown extra fields", () => {
    const obj = JSON.parse(SERVER_TICK_STATE);
    obj.future_extension = { nested: true };
    const msg = decode(JSON.stringify(obj)) as TickState;
    expect(msg.type).toBe("tick_state");
    expect((msg as unknown as Record<string, unknown>).future_extension)
      .toBeUndefined();
  });

  it("drops truncated frames", () => {
    expect(decode(SERVER_TICK_STATE.slice(0, -9))).toBeNull();
  });

  it("drops garbage and unknown types", () => {
    expect(decode("not json")).toBeNull();
    expect(decode("[1,2,3]")).toBeNull();
    expect(decode('{"type":"mystery"}')).toBeNull();
  });

  it("drops malformed vectors", () => {
    const obj = JSON.parse(SERVER_OPERATOR_INPUT);
    obj.hand_force = [1, 2];
    expect(decode(JSON.stringify(obj))).toBeNull();
    obj.hand_force = [1, 2, "three"];
    expect(decode(JSON.stringify(obj))).toBeNull();
  });

  it("drops unknown control actions", () => {
    const obj = JSON.parse(SERVER_CONTROL);
    obj.action = "explode";
    expect(decode(JSON.stringify(obj))).toBeNull();
  });
});

describe("sequencing", () => {
  it("stamps strictly increasing sequence numbers", () => {
    const counter = new SequenceCounter();
    const seqs = Array.from({ length: 50 }, () =>
      counter.stamp<Control>({ type: "control", seq: 0, action: "start" }).seq,
    );
    expect(seqs).toEqual(Array.from({ length: 50 }, (_, i) => i));
  });
});
