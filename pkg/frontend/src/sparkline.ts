/** Tiny per-criterion loss history charts. */

import type { Canvas2D } from "./renderer.js";

export const SPARKLINE_COLOR = "#555588";

/** Append to a bounded history buffer in place. */
export function pushHistory(
  history: number[],
  value: number,
  maxLength = 120,
): void {
  history.push(value);
  if (history.length > maxLength) {
    history.splice(0, history.length - maxLength);
  }
}

export function drawSparkline(
  ctx: Canvas2D,
  width: number,
  height: number,
  values: readonly number[],
): void {
  ctx.clearRect(0, 0, width, height);
  if (values.length < 2) {
    return;
  }
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    min = Math.min(min, v);
    max = Math.max(max, v);
  }
  const span = max - min || 1;
  const pad = 2;
  const stepX = (width - 2 * pad) / (values.length - 1);
  ctx.strokeStyle = SPARKLINE_COLOR;
  ctx.lineWidth = 1;
  ctx.beginPath();
  values.forEach((v, i) => {
    const x = pad + i * stepX;
    const y = height - pad - ((v - min) / span) * (height - 2 * pad);
    if (i === 0) {
      ctx.moveTo(x, y);
    } else {
      ctx.lineTo(x, y);
    }
  });
  ctx.stroke();
}
