// Gaze-proxy mapping, drag-to-force mapping and the fixation synthesizer.

import { describe, expect, it } from "vitest";
import {
  GazeSynthesizer,
  buildOperatorInput,
  cursorGazeTarget,
  dragToForce,
  mulberry32,
  overDrillHandle,
  type DragState,
} from "../src/input.js";
import {
  DEFAULT_LAYOUT,
  DISTRACTOR_CENTER,
  EYE_ORIGIN,
  rayTowardScenePoint,
  sceneToScreen,
  screenToScene,
} from "../src/view.js";

function drag(dx: number, dy: number): DragState {
  return { active: true, anchorX: 100, anchorY: 100, currentX: 100 + dx, currentY: 100 + dy };
}

describe("view mapping", () => {
  it("scene<->screen round trip is exact", () => {
    const [px, py] = sceneToScreen(DEFAULT_LAYOUT, 0.0123, -0.045);
    const [x, z] = screenToScene(DEFAULT_LAYOUT, px, py);
    expect(x).toBeCloseTo(0.0123, 12);
    expect(z).toBeCloseTo(-0.045, 12);
  });

  it("task origin lands at the configured screen origin", () => {
    expect(sceneToScreen(DEFAULT_LAYOUT, 0, 0)).toEqual([
      DEFAULT_LAYOUT.originX,
      DEFAULT_LAYOUT.originY,
    ]);
  });
});

describe("cursor gaze target", () => {
  it("cursor over the drill axis produces a ray through it", () => {
    const [px, py] = sceneToScreen(DEFAULT_LAYOUT, 0, -0.03);
    const target = cursorGazeTarget(DEFAULT_LAYOUT, { x: px, y: py }, false);
    expect(target.kind).toBe("scene");
    // The ray from the eye must pass through the scene point (0, 0, -0.03).
    const d = target.direction;
    const tStar = (0 - EYE_ORIGIN[1]) / d[1]; // parameter at the y=0 plane
    expect(EYE_ORIGIN[0] + tStar * d[0]).toBeCloseTo(0, 9);
    expect(EYE_ORIGIN[2] + tStar * d[2]).toBeCloseTo(-0.03, 9);
  });

  it("off-canvas cursor degrades to background", () => {
    expect(cursorGazeTarget(DEFAULT_LAYOUT, null, false).kind).toBe("background");
    expect(
      cursorGazeTarget(DEFAULT_LAYOUT, { x: -5, y: 10 }, false).kind,
    ).toBe("background");
  });

  it("hovering the distractor widget aims at the distractor display", () => {
    const target = cursorGazeTarget(DEFAULT_LAYOUT, { x: 10, y: 10 }, true);
    expect(target.kind).toBe("distractor");
    const d = target.direction;
    const toCenter = [
      DISTRACTOR_CENTER[0] - EYE_ORIGIN[0],
      DISTRACTOR_CENTER[1] - EYE_ORIGIN[1],
      DISTRACTOR_CENTER[2] - EYE_ORIGIN[2],
    ];
    const n = Math.hypot(...toCenter);
    expect(d[0]).toBeCloseTo(toCenter[0] / n, 9);
    expect(d[1]).toBeCloseTo(toCenter[1] / n, 9);
    expect(d[2]).toBeCloseTo(toCenter[2] / n, 9);
  });
});

describe("drag to force", () => {
  it("no drag means zero force", () => {
    expect(dragToForce({ ...drag(50, 50), active: false })).toEqual([0, 0, 0]);
  });

  it("maps 50 px downward at 0.1 N/px to 5 N along the drill axis", () => {
    const f = dragToForce(drag(0, 50), { newtonsPerPixel: 0.1 });
    expect(f[0]).toBeCloseTo(0, 12);
    expect(f[1]).toBe(0);
    expect(f[2]).toBeCloseTo(5, 12);
  });

  it("clamps the magnitude at the configured limit", () => {
    const f = dragToForce(drag(0, 5000), { newtonsPerPixel: 0.1, forceClampN: 15 });
    expect(Math.hypot(f[0], f[1], f[2])).toBeCloseTo(15, 9);
  });

  it("horizontal drag maps to lateral force", () => {
    const f = dragToForce(drag(-30, 0), { newtonsPerPixel: 0.1 });
    expect(f[0]).toBeCloseTo(-3, 12);
    expect(f[2]).toBeCloseTo(0, 12);
  });
});

describe("drill handle hit test", () => {
  it("hits on the shaft and misses far away", () => {
    const tip: [number, number, number] = [0, 0, 0.005];
    const [tipX, tipY] = sceneToScreen(DEFAULT_LAYOUT, 0, 0.005);
    expect(overDrillHandle(DEFAULT_LAYOUT, tip, tipX, tipY - 50)).toBe(true);
    expect(overDrillHandle(DEFAULT_LAYOUT, tip, tipX + 200, tipY)).toBe(false);
  });
});

describe("gaze synthesizer", () => {
  it("is deterministic in the seed", () => {
    const a = new GazeSynthesizer({ seed: 7 });
    const b = new GazeSynthesizer({ seed: 7 });
    const target = rayTowardScenePoint(0, -0.03);
    for (let i = 0; i < 100; i++) {
      expect(a.sample(target, i * 16.7)).toEqual(b.sample(target, i * 16.7));
    }
  });

  it("produces fixation tremor with periodic hops", () => {
    const synth = new GazeSynthesizer({ seed: 3, holdMs: 350 });
    const target = rayTowardScenePoint(0, -0.03);
    const dirs = Array.from({ length: 240 }, (_, i) =>
      synth.sample(target, i * (1000 / 60)),
    );
    const angles: number[] = [];
    for (let i = 1; i < dirs.length; i++) {
      const dot = Math.min(
        1,
        dirs[i][0] * dirs[i - 1][0] +
          dirs[i][1] * dirs[i - 1][1] +
          dirs[i][2] * dirs[i - 1][2],
      );
      angles.push(Math.acos(dot));
    }
    const sorted = [...angles].sort((x, y) => x - y);
    const median = sorted[Math.floor(sorted.length / 2)];
    const hops = angles.filter((a) => a > 5 * median).length;
    expect(median).toBeLessThan(0.002); // tremor scale
    expect(hops).toBeGreaterThanOrEqual(8); // ~ one hop per 350 ms over 4 s
  });

  it("hops immediately when the target moves materially", () => {
    const synth = new GazeSynthesizer({ seed: 5 });
    const a = synth.sample(rayTowardScenePoint(0, -0.03), 0);
    const b = synth.sample(rayTowardScenePoint(0.03, 0.02), 17);
    const dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    expect(Math.acos(Math.min(1, dot))).toBeGreaterThan(0.02);
  });
});

describe("operator input assembly", () => {
  it("uses the fixed eye origin and carries the force", () => {
    const msg = buildOperatorInput([0, 1, 0], [0, 0, 2], 123.5);
    expect(msg.type).toBe("operator_input");
    expect(msg.gaze_origin).toEqual([0, -0.5, -0.15]);
    expect(msg.hand_force).toEqual([0, 0, 2]);
    expect(msg.client_time).toBe(123.5);
  });
});

describe("mulberry32", () => {
  it("is reproducible and uniform-ish", () => {
    const r1 = mulberry32(42);
    const r2 = mulberry32(42);
    const seq1 = Array.from({ length: 10 }, () => r1());
    const seq2 = Array.from({ length: 10 }, () => r2());
    expect(seq1).toEqual(seq2);
    const mean =
      Array.from({ length: 2000 }, () => r1()).reduce((s, v) => s + v, 0) / 2000;
    expect(mean).toBeGreaterThan(0.45);
    expect(mean).toBeLessThan(0.55);
  });
});
