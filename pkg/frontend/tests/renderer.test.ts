import { describe, expect, it } from "vitest";

import type { Canvas2D } from "../src/renderer.js";
import {
  LONG_EDGE_COLOR,
  NEUTRAL_EDGE_COLOR,
  Renderer,
  SHORT_EDGE_COLOR,
  Viewport,
  edgeColor,
} from "../src/renderer.js";
import { LatestWins } from "../src/stream.js";
import type { EdgeIndex, Point, Snapshot } from "../src/types.js";
import { edgeIndices } from "../src/types.js";
import { cycleGraph, makeSnapshot, p2Graph, polygonPositions } from "./fixtures.js";

interface DrawnArc {
  x: number;
  y: number;
  r: number;
  fill: string;
}

interface DrawnLine {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  stroke: string;
}

/** Records the renderer's draw calls instead of painting pixels. */
class FakeContext implements Canvas2D {
  fillStyle: string | CanvasGradient | CanvasPattern = "";
  strokeStyle: string | CanvasGradient | CanvasPattern = "";
  lineWidth = 0;
  arcs: DrawnArc[] = [];
  lines: DrawnLine[] = [];
  clears = 0;
  private pathArc: { x: number; y: number; r: number } | null = null;
  private pathStart: [number, number] | null = null;
  private pathEnd: [number, number] | null = null;

  clearRect(): void {
    this.clears += 1;
    // a cleared frame starts from nothing: forget earlier shapes
    this.arcs = [];
    this.lines = [];
  }

  beginPath(): void {
    this.pathArc = null;
    this.pathStart = null;
    this.pathEnd = null;
  }

  arc(x: number, y: number, r: number): void {
    this.pathArc = { x, y, r };
  }

  moveTo(x: number, y: number): void {
    this.pathStart = [x, y];
  }

  lineTo(x: number, y: number): void {
    this.pathEnd = [x, y];
  }

  fill(): void {
    if (this.pathArc) {
      this.arcs.push({ ...this.pathArc, fill: String(this.fillStyle) });
    }
  }

  stroke(): void {
    if (this.pathStart && this.pathEnd) {
      this.lines.push({
        x1: this.pathStart[0],
        y1: this.pathStart[1],
        x2: this.pathEnd[0],
        y2: this.pathEnd[1],
        stroke: String(this.strokeStyle),
      });
    }
  }
}

describe("Renderer", () => {
  it("draws one line and two circles for a single-edge graph", () => {
    const ctx = new FakeContext();
    const renderer = new Renderer(ctx, 200, 200);
    const pts: Point[] = [
      [0, 0],
      [1, 0],
    ];
    const snap = makeSnapshot(pts);
    const { counts } = renderer.render(
      snap.positions,
      edgeIndices(p2Graph()),
    );
    expect(counts).toEqual({ nodes: 2, edges: 1 });
    expect(ctx.arcs).toHaveLength(2);
    expect(ctx.lines).toHaveLength(1);
  });

  it("rendered node and edge counts match the snapshot", () => {
    const ctx = new FakeContext();
    const renderer = new Renderer(ctx, 400, 300);
    const graph = cycleGraph(10);
    const snap = makeSnapshot(polygonPositions(10), 120);
    const { counts } = renderer.render(snap.positions, edgeIndices(graph));
    expect(counts.nodes).toBe(snap.positions.length);
    expect(counts.edges).toBe(graph.edges.length);
    expect(ctx.arcs).toHaveLength(10);
    expect(ctx.lines).toHaveLength(10);
  });

  it("keeps every drawn coordinate inside the canvas", () => {
    const ctx = new FakeContext();
    const renderer = new Renderer(ctx, 300, 200);
    const positions = polygonPositions(12, 250);
    renderer.render(positions, edgeIndices(cycleGraph(12)));
    for (const a of ctx.arcs) {
      expect(a.x).toBeGreaterThanOrEqual(0);
      expect(a.x).toBeLessThanOrEqual(300);
      expect(a.y).toBeGreaterThanOrEqual(0);
      expect(a.y).toBeLessThanOrEqual(200);
    }
  });

  it("draws a frame from exactly one snapshot (latest wins)", () => {
    const ctx = new FakeContext();
    const renderer = new Renderer(ctx, 200, 200);
    const graph = cycleGraph(5);
    const edges = edgeIndices(graph);
    const mailbox = new LatestWins<Snapshot>();
    for (let i = 0; i < 60; i++) {
      mailbox.push(makeSnapshot(polygonPositions(5, 1 + i), i));
    }
    const snap = mailbox.take();
    expect(snap).not.toBeNull();
    expect(snap!.iteration).toBe(59);
    const { counts, viewport } = renderer.render(snap!.positions, edges);
    expect(counts).toEqual({ nodes: 5, edges: 5 });
    // every drawn circle is that snapshot's projection, no stale frames mixed
    const expected = snap!.positions.map((p) => viewport.toScreen(p));
    ctx.arcs.forEach((a, i) => {
      expect(a.x).toBeCloseTo(expected[i]![0], 9);
      expect(a.y).toBeCloseTo(expected[i]![1], 9);
    });
    expect(mailbox.take()).toBeNull();
  });
});

describe("edge coloring by length discrepancy", () => {
  it("saturates short edges red and long edges blue", () => {
    const red = hexRgb(SHORT_EDGE_COLOR);
    const blue = hexRgb(LONG_EDGE_COLOR);
    expect(edgeColor(1, 10)).toBe(`rgb(${red[0]}, ${red[1]}, ${red[2]})`);
    expect(edgeColor(10, 1)).toBe(`rgb(${blue[0]}, ${blue[1]}, ${blue[2]})`);
  });

  it("leaves edges at the mean length neutral", () => {
    expect(edgeColor(3, 3)).toBe(NEUTRAL_EDGE_COLOR);
  });

  it("shades toward red below the mean and blue above", () => {
    const slightlyShort = rgbTriple(edgeColor(2.5, 3));
    const slightlyLong = rgbTriple(edgeColor(3.5, 3));
    expect(slightlyShort[0]).toBeGreaterThan(slightlyShort[2]);
    expect(slightlyLong[2]).toBeGreaterThan(slightlyLong[0]);
  });

  it("colors rendered lines by their length", () => {
    const ctx = new FakeContext();
    const renderer = new Renderer(ctx, 200, 200);
    // path with one short and one long edge
    const positions: Point[] = [
      [0, 0],
      [1, 0],
      [5, 0],
    ];
    const edges: EdgeIndex[] = [
      [0, 1],
      [1, 2],
    ];
    renderer.render(positions, edges);
    const shortLine = rgbTriple(ctx.lines[0]!.stroke);
    const longLine = rgbTriple(ctx.lines[1]!.stroke);
    expect(shortLine[0]).toBeGreaterThan(shortLine[2]);
    expect(longLine[2]).toBeGreaterThan(longLine[0]);
  });
});

describe("Viewport", () => {
  it("round-trips screen and world coordinates", () => {
    const positions = polygonPositions(8, 3);
    const vp = new Viewport(positions, 640, 480);
    for (const p of positions) {
      const [sx, sy] = vp.toScreen(p);
      const [wx, wy] = vp.toWorld(sx, sy);
      expect(wx).toBeCloseTo(p[0], 9);
      expect(wy).toBeCloseTo(p[1], 9);
    }
  });

  it("survives a degenerate single-point layout", () => {
    const vp = new Viewport([[2, 2]], 100, 100);
    const [sx, sy] = vp.toScreen([2, 2]);
    expect(Number.isFinite(sx)).toBe(true);
    expect(Number.isFinite(sy)).toBe(true);
  });
});

function hexRgb(hex: string): [number, number, number] {
  return [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
}

function rgbTriple(css: string): [number, number, number] {
  const m = /rgb\((\d+), (\d+), (\d+)\)/.exec(css);
  if (!m) {
    throw new Error(`not an rgb() triple: ${css}`);
  }
  return [Number(m[1]), Number(m[2]), Number(m[3])];
}
