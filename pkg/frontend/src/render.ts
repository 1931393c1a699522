// Pure renderer: console state -> draw list. The canvas painter only walks
// the list, so everything visual is testable without a DOM.

import type { TickState } from "./protocol.js";
import type { ConsoleState } from "./state.js";
import { isStale } from "./state.js";
import { sceneToScreen, type ViewLayout } from "./view.js";

export type DrawItem =
  | { kind: "rect"; x: number; y: number; w: number; h: number; fill: string;
      stroke?: string }
  | { kind: "line"; x1: number; y1: number; x2: number; y2: number;
      color: string; width?: number }
  | { kind: "circle"; x: number; y: number; r: number; fill: string }
  | { kind: "text"; x: number; y: number; text: string; color: string;
      size?: number; align?: "left" | "center" | "right" }
  | { kind: "gauge"; x: number; y: number; w: number; h: number;
      fraction: number; label: string; fill: string }
  | { kind: "overlay"; alpha: number; label: string };

export const COLORS = {
  background: "#10141a",
  bone: "#d8c9a3",
  boneDeep: "#c5b088",
  hole: "#4a3826",
  path: "rgba(80, 140, 255, 0.35)",
  drill: "#e8e8ee",
  drillEdge: "#8a8a96",
  gaze: "#38d430",
  corridor: "rgba(255, 90, 90, 0.25)",
  text: "#dfe5ee",
  dim: "#8b93a3",
  weight: "#4f9cff",
  attention: "#ffb347",
};

export function assistBanner(tick: TickState | null): string {
  if (tick === null) return "waiting for telemetry";
  if (tick.status === "complete") return "drilling complete";
  if (tick.status === "paused") return "paused";
  if (tick.w >= 0.99) return "robot assisting";
  if (tick.w <= 0.01) return "manual control";
  return "blended control";
}

export function buildDrawList(
  state: ConsoleState,
  layout: ViewLayout,
  nowMs: number,
): DrawItem[] {
  const items: DrawItem[] = [];
  items.push({
    kind: "rect", x: 0, y: 0, w: layout.width, h: layout.height,
    fill: COLORS.background,
  });

  const info = state.info;
  const tick = state.tick;
  const targetDepth = info?.target_depth ?? 0.03;
  const boneHalfWidth = 0.045;
  const layers = info?.layer_boundaries?.length
    ? info.layer_boundaries
    : [[0, targetDepth] as [number, number]];
  const boneBottom = Math.max(targetDepth, layers[layers.length - 1][1]);

  // Bone cross-section with its layers.
  layers.forEach(([top, bottom], i) => {
    const [x0, y0] = sceneToScreen(layout, -boneHalfWidth, top);
    const [x1, y1] = sceneToScreen(layout, boneHalfWidth, bottom);
    items.push({
      kind: "rect", x: x0, y: y0, w: x1 - x0, h: y1 - y0,
      fill: i % 2 === 0 ? COLORS.bone : COLORS.boneDeep,
    });
    const [, yb] = sceneToScreen(layout, 0, top);
    if (i > 0) {
      items.push({
        kind: "line", x1: x0, y1: yb, x2: x1, y2: yb,
        color: COLORS.drillEdge, width: 1,
      });
    }
  });

  // Planned path cylinder (side view: a corridor down to the target depth).
  {
    const [x0, y0] = sceneToScreen(layout, -0.005, 0);
    const [x1, y1] = sceneToScreen(layout, 0.005, targetDepth);
    items.push({ kind: "rect", x: x0, y: y0, w: x1 - x0, h: y1 - y0,
                 fill: COLORS.path });
    items.push({ kind: "line", x1: x0, y1, x2: x1, y2: y1,
                 color: COLORS.weight, width: 2 });
  }

  if (tick) {
    // Cut hole: material removed down to the current depth.
    if (tick.depth > 0) {
      const [hx0, hy0] = sceneToScreen(layout, -0.004, 0);
      const [hx1, hy1] = sceneToScreen(layout, 0.004, Math.min(tick.depth, boneBottom));
      items.push({ kind: "rect", x: hx0, y: hy0, w: hx1 - hx0, h: hy1 - hy0,
                   fill: COLORS.hole });
    }

    // Drill shaft drawn upward from the tip.
    const tip = tick.tip_task;
    const [tipX, tipY] = sceneToScreen(layout, tip[0], tip[2]);
    const shaftHalf = 0.013 * layout.pxPerMeter;
    const shaftTop = tipY - 0.12 * layout.pxPerMeter;
    items.push({
      kind: "rect", x: tipX - shaftHalf, y: shaftTop,
      w: 2 * shaftHalf, h: tipY - shaftTop,
      fill: COLORS.drill, stroke: COLORS.drillEdge,
    });

    // Gaze dot: on-plane points render in place; off-plane (the distractor
    // display) pins to the canvas corner marker.
    const gp = tick.gaze_point;
    if (tick.gaze_object === "distractor_display") {
      items.push({ kind: "circle", x: layout.width - 26, y: 26, r: 7,
                   fill: COLORS.gaze });
      items.push({ kind: "text", x: layout.width - 26, y: 44,
                   text: "gaze: distractor", color: COLORS.dim, size: 10,
                   align: "center" });
    } else {
      const [gx, gy] = sceneToScreen(layout, gp[0], gp[2]);
      const cx = Math.min(Math.max(gx, 6), layout.width - 6);
      const cy = Math.min(Math.max(gy, 6), layout.height - 6);
      items.push({ kind: "circle", x: cx, y: cy, r: 6, fill: COLORS.gaze });
    }
  }

  items.push({
    kind: "text", x: 12, y: 22, text: assistBanner(tick),
    color: COLORS.text, size: 14,
  });
  if (tick) {
    items.push({
      kind: "text", x: 12, y: 40,
      text: `phase: ${tick.phase}   t = ${tick.t.toFixed(2)} s`,
      color: COLORS.dim, size: 11,
    });
  }

  if (isStale(state, nowMs)) {
    items.push({
      kind: "overlay", alpha: 0.55,
      label: state.connected ? "telemetry stale" : "disconnected",
    });
  }
  return items;
}

export interface GaugePanel {
  attention: number;
  weight: number;
  depthMm: number;
  targetMm: number;
  boneForceN: number;
  operatorForceN: number;
  feedbackForceN: number;
  status: string;
}

export function gaugePanel(state: ConsoleState): GaugePanel {
  const tick = state.tick;
  const target = (state.info?.target_depth ?? 0.03) * 1e3;
  if (!tick) {
    return {
      attention: 0, weight: 0, depthMm: 0, targetMm: target,
      boneForceN: 0, operatorForceN: 0, feedbackForceN: 0,
      status: "waiting",
    };
  }
  const mag = (v: [number, number, number]) => Math.hypot(v[0], v[1], v[2]);
  return {
    attention: tick.abar,
    weight: tick.w,
    depthMm: tick.depth * 1e3,
    targetMm: target,
    boneForceN: mag(tick.f_sensor),
    operatorForceN: mag(tick.f_operator),
    feedbackForceN: mag(tick.f_fdbk),
    status: tick.status,
  };
}
