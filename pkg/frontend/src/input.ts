// Mouse-as-gaze and drag-as-force proxies.
//
// Gaze: the cursor selects an aim point (a scene-plane point, the distractor
// display, or off-scene background). A real tracker would report fixations
// with tremor and micro-saccades, and the server's segmentation expects that
// texture, so the synthesizer quantizes the cursor into fixate-and-hop form:
// it holds a noisy aim for a dwell period, hops to a refreshed aim, and hops
// immediately when the cursor moves materially. All noise is deterministic
// in the seed.
//
// Force: dragging on the drill handle maps pixel displacement to a hand
// force (vertical drag -> drilling-axis force, horizontal -> lateral),
// clamped to the configured magnitude. No drag means zero force.

import type { OperatorInput, Vec3 } from "./protocol.js";
import {
  AWAY_DIRECTION,
  EYE_ORIGIN,
  rayTowardDistractor,
  rayTowardScenePoint,
  normalize,
  screenToScene,
  insideCanvas,
  type ViewLayout,
} from "./view.js";

export type GazeTargetKind = "scene" | "distractor" | "background";

export interface GazeTarget {
  kind: GazeTargetKind;
  direction: Vec3;
}

/** Deterministic 32-bit PRNG (mulberry32). */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function gaussianPair(rand: () => number): [number, number] {
  // Box-Muller; rand() in [0, 1).
  const u = Math.max(rand(), 1e-12);
  const v = rand();
  const r = Math.sqrt(-2 * Math.log(u));
  return [r * Math.cos(2 * Math.PI * v), r * Math.sin(2 * Math.PI * v)];
}

function perpBasis(d: Vec3): [Vec3, Vec3] {
  const ref: Vec3 = Math.abs(d[2]) < 0.9 ? [0, 0, 1] : [1, 0, 0];
  const e1 = normalize([
    d[1] * ref[2] - d[2] * ref[1],
    d[2] * ref[0] - d[0] * ref[2],
    d[0] * ref[1] - d[1] * ref[0],
  ]);
  const e2: Vec3 = [
    d[1] * e1[2] - d[2] * e1[1],
    d[2] * e1[0] - d[0] * e1[2],
    d[0] * e1[1] - d[1] * e1[0],
  ];
  return [e1, e2];
}

function angleBetween(a: Vec3, b: Vec3): number {
  const dot = Math.min(1, Math.max(-1, a[0] * b[0] + a[1] * b[1] + a[2] * b[2]));
  return Math.acos(dot);
}

export interface GazeSynthesizerOptions {
  seed?: number;
  holdMs?: number; // dwell between micro-saccades
  aimNoiseRad?: number; // per-fixation aim offset
  tremorRad?: number; // per-sample jitter
  refixThresholdRad?: number; // cursor move that forces an immediate hop
}

export class GazeSynthesizer {
  private rand: () => number;
  private holdMs: number;
  private aimNoise: number;
  private tremor: number;
  private refixThreshold: number;
  private base: Vec3 = AWAY_DIRECTION;
  private aim: Vec3 = AWAY_DIRECTION;
  private lastHopMs = -Infinity;

  constructor(opts: GazeSynthesizerOptions = {}) {
    this.rand = mulberry32(opts.seed ?? 1);
    this.holdMs = opts.holdMs ?? 350;
    this.aimNoise = opts.aimNoiseRad ?? 0.006;
    this.tremor = opts.tremorRad ?? 0.0005;
    this.refixThreshold = opts.refixThresholdRad ?? 0.02;
  }

  private hop(target: Vec3): void {
    const [e1, e2] = perpBasis(target);
    const [g1, g2] = gaussianPair(this.rand);
    this.base = target;
    this.aim = normalize([
      target[0] + this.aimNoise * (g1 * e1[0] + g2 * e2[0]),
      target[1] + this.aimNoise * (g1 * e1[1] + g2 * e2[1]),
      target[2] + this.aimNoise * (g1 * e1[2] + g2 * e2[2]),
    ]);
  }

  /** Produce the gaze direction to report for the current cursor target. */
  sample(target: Vec3, nowMs: number): Vec3 {
    if (
      angleBetween(target, this.base) > this.refixThreshold ||
      nowMs - this.lastHopMs >= this.holdMs
    ) {
      this.hop(target);
      this.lastHopMs = nowMs;
    }
    const [e1, e2] = perpBasis(this.aim);
    const [g1, g2] = gaussianPair(this.rand);
    return normalize([
      this.aim[0] + this.tremor * (g1 * e1[0] + g2 * e2[0]),
      this.aim[1] + this.tremor * (g1 * e1[1] + g2 * e2[1]),
      this.aim[2] + this.tremor * (g1 * e1[2] + g2 * e2[2]),
    ]);
  }
}

export interface DragState {
  active: boolean;
  anchorX: number;
  anchorY: number;
  currentX: number;
  currentY: number;
}

export const IDLE_DRAG: DragState = {
  active: false,
  anchorX: 0,
  anchorY: 0,
  currentX: 0,
  currentY: 0,
};

export interface InputOptions {
  newtonsPerPixel?: number;
  forceClampN?: number;
}

/** Drag displacement -> task-frame hand force, clamped in magnitude. */
export function dragToForce(drag: DragState, opts: InputOptions = {}): Vec3 {
  if (!drag.active) return [0, 0, 0];
  const nPerPx = opts.newtonsPerPixel ?? 0.002;
  const clamp = opts.forceClampN ?? 15;
  // Screen-down equals task +z (deeper), screen-right equals task +x.
  let fx = (drag.currentX - drag.anchorX) * nPerPx;
  let fz = (drag.currentY - drag.anchorY) * nPerPx;
  const mag = Math.hypot(fx, fz);
  if (mag > clamp) {
    fx *= clamp / mag;
    fz *= clamp / mag;
  }
  return [fx, 0, fz];
}

/** Resolve what the cursor is looking at. */
export function cursorGazeTarget(
  layout: ViewLayout,
  cursor: { x: number; y: number } | null,
  overDistractor: boolean,
): GazeTarget {
  if (overDistractor) {
    return { kind: "distractor", direction: rayTowardDistractor() };
  }
  if (cursor === null || !insideCanvas(layout, cursor.x, cursor.y)) {
    return { kind: "background", direction: AWAY_DIRECTION };
  }
  const [x, z] = screenToScene(layout, cursor.x, cursor.y);
  return { kind: "scene", direction: rayTowardScenePoint(x, z) };
}

/** Assemble the operator_input message for the current input state. */
export function buildOperatorInput(
  gazeDirection: Vec3,
  force: Vec3,
  clientTime: number,
): OperatorInput {
  return {
    type: "operator_input",
    seq: 0,
    hand_force: force,
    gaze_origin: [...EYE_ORIGIN] as Vec3,
    gaze_direction: gazeDirection,
    client_time: clientTime,
  };
}

/** Hit test for the drill handle in screen space. */
export function overDrillHandle(
  layout: ViewLayout,
  drillTipTask: Vec3,
  px: number,
  py: number,
): boolean {
  const tipX = layout.originX + drillTipTask[0] * layout.pxPerMeter;
  const tipY = layout.originY + drillTipTask[2] * layout.pxPerMeter;
  const shaftTop = tipY - 0.12 * layout.pxPerMeter;
  const halfWidth = 0.013 * layout.pxPerMeter + 6;
  return Math.abs(px - tipX) <= halfWidth && py >= shaftTop - 10 && py <= tipY + 10;
}
