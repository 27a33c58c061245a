/** Canvas rendering of layout snapshots.
 *
 * Rendering is a pure projection of server snapshots: positions come in,
 * circles and lines go out. Edge color encodes length discrepancy within
 * the drawn layout: edges shorter than the mean edge length shade toward
 * red, longer ones toward blue. The drawing surface is a narrow interface
 * so tests can substitute a recording fake for CanvasRenderingContext2D.
 */

import type { EdgeIndex, Point } from "./types.js";

/** The subset of CanvasRenderingContext2D the renderer draws with. */
export interface Canvas2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  fill(): void;
  stroke(): void;
}

export const SHORT_EDGE_COLOR = "#d62728";
export const NEUTRAL_EDGE_COLOR = "#888888";
export const LONG_EDGE_COLOR = "#1f77b4";
export const NODE_COLOR = "#1a1a2e";
export const NODE_RADIUS = 4.5;

function hexToRgb(hex: string): [number, number, number] {
  return [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
}

function mix(a: string, b: string, t: number): string {
  const ca = hexToRgb(a);
  const cb = hexToRgb(b);
  const c = ca.map((v, i) => Math.round(v + (cb[i]! - v) * t));
  return `rgb(${c[0]}, ${c[1]}, ${c[2]})`;
}

/**
 * Diverging color for an edge of the given length among edges with the
 * given mean length: red below the mean, neutral at it, blue above. The
 * deviation is measured as a log ratio so halving and doubling saturate
 * symmetrically.
 */
export function edgeColor(length: number, meanLength: number): string {
  if (!(meanLength > 0) || !(length > 0)) {
    return NEUTRAL_EDGE_COLOR;
  }
  const t = Math.max(-1, Math.min(1, Math.log2(length / meanLength)));
  if (t === 0) {
    return NEUTRAL_EDGE_COLOR;
  }
  return t < 0
    ? mix(NEUTRAL_EDGE_COLOR, SHORT_EDGE_COLOR, -t)
    : mix(NEUTRAL_EDGE_COLOR, LONG_EDGE_COLOR, t);
}

/** World-to-screen fit of a layout into a canvas, margin included. */
export class Viewport {
  readonly scale: number;
  readonly offsetX: number;
  readonly offsetY: number;

  constructor(
    positions: readonly Point[],
    readonly width: number,
    readonly height: number,
    margin = 24,
  ) {
    let minX = Infinity;
    let minY = Infinity;
    let maxX = -Infinity;
    let maxY = -Infinity;
    for (const [x, y] of positions) {
      minX = Math.min(minX, x);
      minY = Math.min(minY, y);
      maxX = Math.max(maxX, x);
      maxY = Math.max(maxY, y);
    }
    if (positions.length === 0) {
      minX = minY = -1;
      maxX = maxY = 1;
    }
    const spanX = Math.max(maxX - minX, 1e-9);
    const spanY = Math.max(maxY - minY, 1e-9);
    const usableW = Math.max(width - 2 * margin, 1);
    const usableH = Math.max(height - 2 * margin, 1);
    this.scale = Math.min(usableW / spanX, usableH / spanY);
    this.offsetX = width / 2 - this.scale * (minX + maxX) / 2;
    this.offsetY = height / 2 + this.scale * (minY + maxY) / 2;
  }

  toScreen([x, y]: Point): [number, number] {
    // world y grows upward, screen y grows downward
    return [this.offsetX + this.scale * x, this.offsetY - this.scale * y];
  }

  toWorld(px: number, py: number): [number, number] {
    return [
      (px - this.offsetX) / this.scale,
      (this.offsetY - py) / this.scale,
    ];
  }
}

export interface RenderCounts {
  nodes: number;
  edges: number;
}

export class Renderer {
  constructor(
    private readonly ctx: Canvas2D,
    readonly width: number,
    readonly height: number,
  ) {}

  /**
   * Draw one complete snapshot. Returns the draw counts and the viewport
   * used, so hit-testing and drag mapping share the exact transform that
   * produced the frame.
   */
  render(
    positions: readonly Point[],
    edges: readonly EdgeIndex[],
    viewport?: Viewport,
  ): { counts: RenderCounts; viewport: Viewport } {
    const vp =
      viewport ?? new Viewport(positions, this.width, this.height);
    const ctx = this.ctx;
    ctx.clearRect(0, 0, this.width, this.height);

    let meanLen = 0;
    const lengths: number[] = [];
    for (const [a, b] of edges) {
      const [ax, ay] = positions[a]!;
      const [bx, by] = positions[b]!;
      const len = Math.hypot(bx - ax, by - ay);
      lengths.push(len);
      meanLen += len;
    }
    meanLen = edges.length > 0 ? meanLen / edges.length : 0;

    let drawnEdges = 0;
    ctx.lineWidth = 1.5;
    edges.forEach(([a, b], i) => {
      const pa = vp.toScreen(positions[a]!);
      const pb = vp.toScreen(positions[b]!);
      ctx.strokeStyle = edgeColor(lengths[i]!, meanLen);
      ctx.beginPath();
      ctx.moveTo(pa[0], pa[1]);
      ctx.lineTo(pb[0], pb[1]);
      ctx.stroke();
      drawnEdges += 1;
    });

    let drawnNodes = 0;
    ctx.fillStyle = NODE_COLOR;
    for (const p of positions) {
      const [sx, sy] = vp.toScreen(p);
      ctx.beginPath();
      ctx.arc(sx, sy, NODE_RADIUS, 0, 2 * Math.PI);
      ctx.fill();
      drawnNodes += 1;
    }

    return { counts: { nodes: drawnNodes, edges: drawnEdges }, viewport: vp };
  }
}
