/** Export of the current layout as JSON or SVG.
 *
 * The JSON form matches the layout schema the service and CLI consume
 * ({"positions": [[x, y], ...]}), so an exported file can seed a new
 * session or a CLI run unchanged. The SVG mirrors the canvas drawing,
 * including the short-red/long-blue edge coloring.
 */

import { NODE_COLOR, Viewport, edgeColor } from "./renderer.js";
import type { EdgeIndex, Point } from "./types.js";

export function exportLayoutJson(positions: readonly Point[]): string {
  return JSON.stringify(
    { positions: positions.map(([x, y]) => [x, y]) },
    null,
    2,
  );
}

export function exportSvg(
  positions: readonly Point[],
  edges: readonly EdgeIndex[],
  width = 800,
  height = 800,
): string {
  const vp = new Viewport(positions, width, height);
  const fmt = (v: number) => v.toFixed(2);

  let meanLen = 0;
  const lengths = edges.map(([a, b]) => {
    const [ax, ay] = positions[a]!;
    const [bx, by] = positions[b]!;
    return Math.hypot(bx - ax, by - ay);
  });
  if (lengths.length > 0) {
    meanLen = lengths.reduce((s, v) => s + v, 0) / lengths.length;
  }

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" ` +
      `viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">`,
  ];
  edges.forEach(([a, b], i) => {
    const [x1, y1] = vp.toScreen(positions[a]!);
    const [x2, y2] = vp.toScreen(positions[b]!);
    parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${edgeColor(lengths[i]!, meanLen)}" stroke-width="1.5"/>`,
    );
  });
  for (const p of positions) {
    const [cx, cy] = vp.toScreen(p);
    parts.push(
      `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="4.5" fill="${NODE_COLOR}"/>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n");
}

/** Hand a text file to the browser as a download. */
export function downloadText(
  filename: string,
  text: string,
  mime = "application/json",
): void {
  const blob = new Blob([text], { type: mime });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}
