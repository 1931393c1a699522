// Operator console wiring: canvas, side panel, input capture, telemetry.

import { paint } from "./canvas.js";
import { DistractorWidget } from "./distractor.js";
import {
  GazeSynthesizer,
  IDLE_DRAG,
  buildOperatorInput,
  cursorGazeTarget,
  dragToForce,
  overDrillHandle,
  type DragState,
} from "./input.js";
import { ConsoleClient } from "./net.js";
import { buildDrawList, gaugePanel, COLORS } from "./render.js";
import { applyConnection, applyMessage, initialState, type ConsoleState } from "./state.js";
import { DEFAULT_LAYOUT } from "./view.js";

const SEND_HZ = 60;

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function main(): void {
  const canvas = byId<HTMLCanvasElement>("scene");
  const layout = { ...DEFAULT_LAYOUT, width: canvas.width, height: canvas.height };
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");

  let state: ConsoleState = initialState();
  let cursor: { x: number; y: number } | null = null;
  let overWidget = false;
  let drag: DragState = IDLE_DRAG;
  const gaze = new GazeSynthesizer({ seed: 2024 });
  const widget = new DistractorWidget(17);

  const params = new URLSearchParams(location.search);
  const port = params.get("port") ?? "8765";
  const host = params.get("host") ?? location.hostname ?? "127.0.0.1";
  const client = new ConsoleClient(`ws://${host || "127.0.0.1"}:${port}/`, {
    onMessage: (msg) => {
      state = applyMessage(state, msg, performance.now());
      refreshPanel();
    },
    onStatus: (connected) => {
      state = applyConnection(state, connected);
      byId("conn").textContent = connected ? "connected" : "reconnecting...";
    },
  });

  // -- input capture -----------------------------------------------------

  canvas.addEventListener("mousemove", (ev) => {
    const rect = canvas.getBoundingClientRect();
    cursor = { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
    if (drag.active) {
      drag = { ...drag, currentX: cursor.x, currentY: cursor.y };
    }
  });
  canvas.addEventListener("mouseleave", () => {
    cursor = null;
    drag = IDLE_DRAG;
  });
  canvas.addEventListener("mousedown", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const px = ev.clientX - rect.left;
    const py = ev.clientY - rect.top;
    const tip = state.tick?.tip_task ?? [0, 0, 0];
    if (overDrillHandle(layout, tip, px, py)) {
      drag = { active: true, anchorX: px, anchorY: py, currentX: px, currentY: py };
    }
  });
  window.addEventListener("mouseup", () => {
    drag = IDLE_DRAG;
  });

  const widgetPanel = byId("distractor");
  widgetPanel.addEventListener("mouseenter", () => { overWidget = true; });
  widgetPanel.addEventListener("mouseleave", () => { overWidget = false; });

  byId("start").addEventListener("click", () =>
    client.send({ type: "control", seq: 0, action: "start" }));
  byId("pause").addEventListener("click", () =>
    client.send({ type: "control", seq: 0, action: "pause" }));
  byId("reset").addEventListener("click", () =>
    client.send({ type: "control", seq: 0, action: "reset" }));
  byId<HTMLSelectElement>("mode").addEventListener("change", (ev) => {
    const mode = (ev.target as HTMLSelectElement).value;
    client.send({ type: "control", seq: 0, action: "set_mode", mode });
  });

  byId("widget-toggle").addEventListener("click", () => {
    widget.toggle();
    refreshWidget();
  });
  byId<HTMLFormElement>("widget-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const field = byId<HTMLInputElement>("widget-answer");
    const value = Number.parseInt(field.value, 10);
    if (!Number.isNaN(value)) widget.submit(value);
    field.value = "";
    refreshWidget();
  });

  function refreshWidget(): void {
    widgetPanel.style.display = widget.active ? "block" : "none";
    byId("widget-prompt").textContent = widget.prompt.text;
    byId("widget-score").textContent = `solved: ${widget.solved}`;
    byId("widget-toggle").textContent = widget.active
      ? "hide distractor"
      : "show distractor";
  }

  // -- telemetry out at a fixed rate --------------------------------------

  setInterval(() => {
    const activeWidget = widget.active && overWidget;
    const target = cursorGazeTarget(layout, cursor, activeWidget);
    const direction = gaze.sample(target.direction, performance.now());
    const force = dragToForce(drag);
    client.send(buildOperatorInput(direction, force, Date.now() / 1000));
  }, 1000 / SEND_HZ);

  // -- render loop ---------------------------------------------------------

  function refreshPanel(): void {
    const g = gaugePanel(state);
    byId("depth").textContent =
      `${g.depthMm.toFixed(2)} / ${g.targetMm.toFixed(0)} mm`;
    byId("f-bone").textContent = `${g.boneForceN.toFixed(3)} N`;
    byId("f-op").textContent = `${g.operatorForceN.toFixed(3)} N`;
    byId("f-fdbk").textContent = `${g.feedbackForceN.toFixed(3)} N`;
    byId("status").textContent = g.status;
    const att = byId("gauge-attention");
    const wgt = byId("gauge-weight");
    att.style.width = `${(g.attention * 100).toFixed(1)}%`;
    att.style.background = COLORS.attention;
    wgt.style.width = `${(g.weight * 100).toFixed(1)}%`;
    wgt.style.background = COLORS.weight;
  }

  function frame(): void {
    paint(ctx!, buildDrawList(state, layout, performance.now()),
          layout.width, layout.height);
    requestAnimationFrame(frame);
  }
  refreshWidget();
  requestAnimationFrame(frame);
}

window.addEventListener("load", main);
