// Screen <-> scene mapping for the 2-D side view.
//
// The scene canvas shows the task-frame x-z plane (y = 0): x runs to the
// right in screen space, z (the drilling axis, pointing down into the bone)
// runs down the screen. The mapping is a pure scale + offset, so it inverts
// exactly; everything off the canvas maps to background gaze.

import type { Vec3 } from "./protocol.js";

export interface ViewLayout {
  width: number; // scene canvas size [px]
  height: number;
  pxPerMeter: number;
  originX: number; // screen position of task-frame (0, 0) [px]
  originY: number;
}

export const DEFAULT_LAYOUT: ViewLayout = {
  width: 620,
  height: 620,
  pxPerMeter: 2800,
  originX: 310,
  originY: 420,
};

// Fixed observer used for the gaze proxy; matches the scripted operator.
export const EYE_ORIGIN: Vec3 = [0.0, -0.5, -0.15];

// Center of the distractor display object in the simulator scene.
export const DISTRACTOR_CENTER: Vec3 = [0.35, -0.15, -0.2];

// Fail-safe direction: over the scene into the enclosing background box.
export const AWAY_DIRECTION: Vec3 = [0.0, 1.0, 0.0];

export function sceneToScreen(
  layout: ViewLayout,
  x: number,
  z: number,
): [number, number] {
  return [
    layout.originX + x * layout.pxPerMeter,
    layout.originY + z * layout.pxPerMeter,
  ];
}

export function screenToScene(
  layout: ViewLayout,
  px: number,
  py: number,
): [number, number] {
  return [
    (px - layout.originX) / layout.pxPerMeter,
    (py - layout.originY) / layout.pxPerMeter,
  ];
}

export function insideCanvas(layout: ViewLayout, px: number, py: number): boolean {
  return px >= 0 && py >= 0 && px < layout.width && py < layout.height;
}

export function normalize(v: Vec3): Vec3 {
  const n = Math.hypot(v[0], v[1], v[2]);
  if (n === 0) return [0, 1, 0];
  return [v[0] / n, v[1] / n, v[2] / n];
}

/** Direction from the fixed eye toward a point on the y = 0 scene plane. */
export function rayTowardScenePoint(x: number, z: number): Vec3 {
  return normalize([x - EYE_ORIGIN[0], 0.0 - EYE_ORIGIN[1], z - EYE_ORIGIN[2]]);
}

export function rayTowardDistractor(): Vec3 {
  return normalize([
    DISTRACTOR_CENTER[0] - EYE_ORIGIN[0],
    DISTRACTOR_CENTER[1] - EYE_ORIGIN[1],
    DISTRACTOR_CENTER[2] - EYE_ORIGIN[2],
  ]);
}
