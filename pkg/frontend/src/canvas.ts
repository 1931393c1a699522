// Thin canvas painter: walks a draw list produced by render.ts.

import type { DrawItem } from "./render.js";

export function paint(
  ctx: CanvasRenderingContext2D,
  items: DrawItem[],
  width: number,
  height: number,
): void {
  for (const item of items) {
    switch (item.kind) {
      case "rect":
        ctx.fillStyle = item.fill;
        ctx.fillRect(item.x, item.y, item.w, item.h);
        if (item.stroke) {
          ctx.strokeStyle = item.stroke;
          ctx.strokeRect(item.x, item.y, item.w, item.h);
        }
        break;
      case "line":
        ctx.strokeStyle = item.color;
        ctx.lineWidth = item.width ?? 1;
        ctx.beginPath();
        ctx.moveTo(item.x1, item.y1);
        ctx.lineTo(item.x2, item.y2);
        ctx.stroke();
        break;
      case "circle":
        ctx.fillStyle = item.fill;
        ctx.beginPath();
        ctx.arc(item.x, item.y, item.r, 0, 2 * Math.PI);
        ctx.fill();
        break;
      case "text":
        ctx.fillStyle = item.color;
        ctx.font = `${item.size ?? 12}px system-ui, sans-serif`;
        ctx.textAlign = item.align ?? "left";
        ctx.fillText(item.text, item.x, item.y);
        break;
      case "gauge": {
        ctx.fillStyle = "#22262e";
        ctx.fillRect(item.x, item.y, item.w, item.h);
        ctx.fillStyle = item.fill;
        const frac = Math.min(Math.max(item.fraction, 0), 1);
        ctx.fillRect(item.x, item.y, item.w * frac, item.h);
        ctx.fillStyle = "#dfe5ee";
        ctx.font = "11px system-ui, sans-serif";
        ctx.textAlign = "left";
        ctx.fillText(item.label, item.x, item.y - 4);
        break;
      }
      case "overlay":
        ctx.fillStyle = `rgba(20, 22, 26, ${item.alpha})`;
        ctx.fillRect(0, 0, width, height);
        ctx.fillStyle = "#dfe5ee";
        ctx.font = "18px system-ui, sans-serif";
        ctx.textAlign = "center";
        ctx.fillText(item.label, width / 2, height / 2);
        break;
    }
  }
}
