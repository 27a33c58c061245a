/** Node dragging: pointer events to drag requests.
 *
 * While the pointer is down, moves are throttled into drag requests that
 * pin the node for a short hold so the optimizer does not tug it between
 * updates. Release always sends one final request with the exact release
 * position and no hold. Pointer coordinates are clamped to the canvas
 * before mapping to world space, so dragging past the border parks the
 * node at the edge instead of flinging it off-screen.
 */

import type { ApiClient } from "./api.js";
import type { Viewport } from "./renderer.js";
import type { DragAck, Point } from "./types.js";

/** Index of the position within hit range of a screen point, or null. */
export function nearestNode(
  positions: readonly Point[],
  viewport: Viewport,
  px: number,
  py: number,
  radiusPx = 12,
): number | null {
  let best: number | null = null;
  let bestDist = radiusPx;
  positions.forEach((p, i) => {
    const [sx, sy] = viewport.toScreen(p);
    const d = Math.hypot(sx - px, sy - py);
    if (d <= bestDist) {
      best = i;
      bestDist = d;
    }
  });
  return best;
}

export interface DragControllerOptions {
  /** Minimum milliseconds between drag requests while moving. */
  moveIntervalMs?: number;
  /** Iterations the node stays pinned after each mid-drag update. */
  holdWhileDragging?: number;
}

export class DragController {
  private activeNode: number | null = null;
  private pendingMove: [number, number] | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private readonly moveIntervalMs: number;
  private readonly holdWhileDragging: number;

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
    private readonly viewport: () => Viewport,
    private readonly width: number,
    private readonly height: number,
    options: DragControllerOptions = {},
  ) {
    this.moveIntervalMs = options.moveIntervalMs ?? 50;
    this.holdWhileDragging = options.holdWhileDragging ?? 30;
  }

  get dragging(): number | null {
    return this.activeNode;
  }

  private clampToCanvas(px: number, py: number): [number, number] {
    return [
      Math.max(0, Math.min(this.width, px)),
      Math.max(0, Math.min(this.height, py)),
    ];
  }

  /** World position for a (possibly off-canvas) pointer position. */
  worldAt(px: number, py: number): [number, number] {
    const [cx, cy] = this.clampToCanvas(px, py);
    return this.viewport().toWorld(cx, cy);
  }

  pointerDown(node: number): void {
    this.activeNode = node;
    this.pendingMove = null;
  }

  pointerMove(px: number, py: number): void {
    if (this.activeNode === null) {
      return;
    }
    this.pendingMove = this.worldAt(px, py);
    if (this.timer === null) {
      this.sendPendingMove();
      this.timer = setTimeout(() => {
        this.timer = null;
        this.sendPendingMove();
      }, this.moveIntervalMs);
    }
  }

  private sendPendingMove(): void {
    if (this.activeNode === null || this.pendingMove === null) {
      return;
    }
    const [x, y] = this.pendingMove;
    this.pendingMove = null;
    // mid-drag updates are advisory: the final position goes on release
    this.api
      .dragNode(this.sessionId, this.activeNode, x, y, this.holdWhileDragging)
      .catch(() => {});
  }

  /** Send the release position; resolves null when no drag was active. */
  async pointerUp(px: number, py: number): Promise<DragAck | null> {
    if (this.activeNode === null) {
      return null;
    }
    const node = this.activeNode;
    this.activeNode = null;
    this.pendingMove = null;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    const [x, y] = this.worldAt(px, py);
    return this.api.dragNode(this.sessionId, node, x, y, 0);
  }
}
