/** Mocked session service and small graph/stream builders for tests. */

import type { FetchLike } from "../src/api.js";
import type {
  GraphObj,
  Point,
  SessionDescription,
  Snapshot,
  Weights,
} from "../src/types.js";

export function p2Graph(): GraphObj {
  return { nodes: ["a", "b"], edges: [["a", "b"]] };
}

export function cycleGraph(n: number): GraphObj {
  const nodes = Array.from({ length: n }, (_, i) => String(i));
  const edges = nodes.map(
    (v, i) => [v, nodes[(i + 1) % n]!] as [string, string],
  );
  return { nodes, edges };
}

export function polygonPositions(n: number, radius = 1): Point[] {
  return Array.from({ length: n }, (_, i) => {
    const t = (2 * Math.PI * i) / n;
    return [radius * Math.cos(t), radius * Math.sin(t)] as const;
  });
}

export function makeSnapshot(
  positions: Point[],
  iteration = 0,
  losses: Record<string, number> = { ST: 1.0 },
): Snapshot {
  return {
    type: "snapshot",
    iteration,
    positions,
    losses,
    total: Object.values(losses).reduce((s, v) => s + v, 0),
    qualities: null,
  };
}

/** A byte stream of the given text, split into fixed-size chunks. */
export function streamOf(
  text: string,
  chunkSize = 7,
): ReadableStream<Uint8Array> {
  const bytes = new TextEncoder().encode(text);
  let offset = 0;
  return new ReadableStream<Uint8Array>({
    pull(controller) {
      if (offset >= bytes.length) {
        controller.close();
        return;
      }
      controller.enqueue(bytes.slice(offset, offset + chunkSize));
      offset += chunkSize;
    },
  });
}

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

/**
 * In-memory stand-in for the session service: records every request and
 * answers with the same shapes the real service produces.
 */
export class MockService {
  readonly calls: RecordedCall[] = [];
  readonly sessionId = "mock-session-1";
  status = "paused";
  iteration = 42;
  streamText = "";
  private failures = new Map<string, number>();

  constructor(
    private readonly graph: GraphObj,
    private readonly positions: Point[],
    private weights: Weights = { ST: 1.0 },
  ) {}

  /** Make the next request whose path ends with the suffix fail. */
  failNext(pathSuffix: string, status = 400): void {
    this.failures.set(pathSuffix, status);
  }

  callsTo(method: string, pathSuffix: string): RecordedCall[] {
    return this.calls.filter(
      (c) => c.method === method && c.path.endsWith(pathSuffix),
    );
  }

  describe(): SessionDescription {
    return {
      id: this.sessionId,
      status: this.status,
      iteration: this.iteration,
      n: this.graph.nodes.length,
      edges: this.graph.edges.length,
      graph: this.graph,
      positions: this.positions,
      weights: this.weights,
      losses: { ST: 1.0 },
      cadence: 10,
      converged_at: null,
      error: null,
    };
  }

  get fetch(): FetchLike {
    return async (url, init) => {
      const method = init?.method ?? "GET";
      const path = url.replace(/^https?:\/\/[^/]+/, "");
      const body = init?.body ? JSON.parse(String(init.body)) : undefined;
      this.calls.push({ method, path, body });

      for (const [suffix, status] of this.failures) {
        if (path.endsWith(suffix)) {
          this.failures.delete(suffix);
          return jsonResponse({ detail: `mock failure on ${suffix}` }, status);
        }
      }

      if (method === "POST" && path === "/sessions") {
        return jsonResponse(this.describe(), 201);
      }
      if (method === "GET" && path === `/sessions/${this.sessionId}`) {
        return jsonResponse(this.describe());
      }
      if (
        method === "PATCH" &&
        path === `/sessions/${this.sessionId}/weights`
      ) {
        this.weights = body as Weights;
        return jsonResponse({
          ok: true,
          applies_at_iteration: this.iteration + 1,
        });
      }
      if (method === "POST" && path === `/sessions/${this.sessionId}/drag`) {
        return jsonResponse({ ok: true, iteration: this.iteration });
      }
      if (method === "POST" && path === `/sessions/${this.sessionId}/pause`) {
        this.status = "paused";
        return jsonResponse({ ok: true });
      }
      if (method === "POST" && path === `/sessions/${this.sessionId}/resume`) {
        this.status = "running";
        return jsonResponse({ ok: true });
      }
      if (method === "DELETE" && path === `/sessions/${this.sessionId}`) {
        return jsonResponse({ ok: true });
      }
      if (method === "GET" && path === `/sessions/${this.sessionId}/stream`) {
        return new Response(streamOf(this.streamText), {
          status: 200,
          headers: { "Content-Type": "application/x-ndjson" },
        });
      }
      return jsonResponse({ detail: `no route for ${method} ${path}` }, 404);
    };
  }
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** The full endpoint surface the service documents. */
export const DOCUMENTED_ENDPOINTS: RegExp[] = [
  /^POST \/sessions$/,
  /^GET \/sessions\/[^/]+$/,
  /^PATCH \/sessions\/[^/]+\/weights$/,
  /^POST \/sessions\/[^/]+\/drag$/,
  /^POST \/sessions\/[^/]+\/pause$/,
  /^POST \/sessions\/[^/]+\/resume$/,
  /^DELETE \/sessions\/[^/]+$/,
  /^GET \/sessions\/[^/]+\/stream$/,
];

export function isDocumentedCall(call: RecordedCall): boolean {
  const line = `${call.method} ${call.path}`;
  return DOCUMENTED_ENDPOINTS.some((re) => re.test(line));
}
