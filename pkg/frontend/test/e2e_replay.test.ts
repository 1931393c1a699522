// Replay conformance: a trace recorded by the simulator is re-emitted over
// telemetry and every received frame must decode against the schema and
// render without error at the telemetry rate.

import { describe, expect, it } from "vitest";
import { spawnSync, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { createServer } from "node:net";
import WebSocket from "ws";

import { decode, type SessionInfo, type TickState } from "../src/protocol.js";
import { applyConnection, applyMessage, initialState } from "../src/state.js";
import { buildDrawList } from "../src/render.js";
import { DEFAULT_LAYOUT } from "../src/view.js";

const HAVE_CLI =
  spawnSync("gazedrill", ["--help"], { stdio: "ignore" }).status === 0;

function freePort(): Promise<number> {
  return new Promise((resolve) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const port = (srv.address() as { port: number }).port;
      srv.close(() => resolve(port));
    });
  });
}

describe.skipIf(!HAVE_CLI)("recorded trace replay", () => {
  it(
    "every replayed frame decodes and renders",
    async () => {
      const dir = mkdtempSync(join(tmpdir(), "gazedrill-replay-"));
      const cfg = join(dir, "cfg.yaml");
      writeFileSync(cfg, "session:\n  max_duration: 8.0\n  seed: 5\n");
      const run = spawnSync(
        "gazedrill",
        ["run", "--config", cfg, "--mode", "shared", "--out", dir],
        { stdio: "ignore" },
      );
      expect(run.status).toBe(0);
      const trace = join(dir, "run_shared.trace.ndjson");

      const port = await freePort();
      const replay = spawn(
        "gazedrill",
        ["replay", trace, "--port", String(port), "--speed", "8.0"],
        { stdio: "ignore" },
      );
      try {
        const frames: string[] = [];
        await new Promise<void>((resolve, reject) => {
          let attempts = 0;
          const tryConnect = () => {
            attempts += 1;
            const ws = new WebSocket(`ws://127.0.0.1:${port}/`);
            ws.on("open", () => {
              ws.on("message", (data) => frames.push(data.toString()));
              ws.on("close", () => resolve());
            });
            ws.on("error", () => {
              ws.terminate();
              if (attempts > 50) reject(new Error("replay server never came up"));
              else setTimeout(tryConnect, 200);
            });
          };
          tryConnect();
        });

        // 8 s of sim at 60 Hz telemetry: expect on the order of 480 frames.
        expect(frames.length).toBeGreaterThan(300);
        let state = applyConnection(initialState(), true);
        let infoSeen = false;
        let ticks = 0;
        let wall = 0;
        for (const frame of frames) {
          const msg = decode(frame);
          expect(msg).not.toBeNull(); // schema conformance of every frame
          if (msg!.type === "session_info") infoSeen = true;
          if (msg!.type === "tick_state") ticks += 1;
          wall += 1000 / 60;
          state = applyMessage(state, msg!, wall);
          const items = buildDrawList(state, DEFAULT_LAYOUT, wall);
          expect(items.length).toBeGreaterThan(5);
        }
        expect(infoSeen).toBe(true);
        expect(ticks).toBeGreaterThan(300);
        const info = state.info as SessionInfo;
        expect(info.layer_boundaries.length).toBe(2);
        const last = state.tick as TickState;
        expect(last.t).toBeGreaterThan(7.5);
      } finally {
        replay.kill();
      }
    },
    60_000,
  );
});
