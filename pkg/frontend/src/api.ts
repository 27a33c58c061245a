/** Typed client for the session service.
 *
 * Every request the UI makes goes through this class, so the documented
 * endpoint surface (create/get/weights/drag/pause/resume/delete/stream) is
 * also the complete list of calls the frontend can issue. The fetch
 * implementation is injectable for contract tests.
 */

import type {
  CreateSessionBody,
  DragAck,
  SessionDescription,
  Weights,
  WeightsAck,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

async function parseError(res: Response): Promise<never> {
  let detail = res.statusText;
  try {
    const body: unknown = await res.json();
    if (body && typeof body === "object" && "detail" in body) {
      detail = String((body as { detail: unknown }).detail);
    }
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(res.status, detail);
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchFn(this.base + path, init);
    if (!res.ok) {
      await parseError(res);
    }
    return (await res.json()) as T;
  }

  createSession(body: CreateSessionBody): Promise<SessionDescription> {
    return this.request("POST", "/sessions", body);
  }

  getSession(id: string): Promise<SessionDescription> {
    return this.request("GET", `/sessions/${id}`);
  }

  setWeights(id: string, weights: Weights): Promise<WeightsAck> {
    return this.request("PATCH", `/sessions/${id}/weights`, weights);
  }

  dragNode(
    id: string,
    node: number,
    x: number,
    y: number,
    hold = 0,
  ): Promise<DragAck> {
    return this.request("POST", `/sessions/${id}/drag`, { node, x, y, hold });
  }

  pause(id: string): Promise<{ ok: boolean }> {
    return this.request("POST", `/sessions/${id}/pause`);
  }

  resume(id: string): Promise<{ ok: boolean }> {
    return this.request("POST", `/sessions/${id}/resume`);
  }

  deleteSession(id: string): Promise<{ ok: boolean }> {
    return this.request("DELETE", `/sessions/${id}`);
  }

  /** Open the NDJSON event stream; the caller owns the returned body. */
  async openStream(id: string): Promise<ReadableStream<Uint8Array>> {
    const res = await this.fetchFn(`${this.base}/sessions/${id}/stream`, {
      method: "GET",
    });
    if (!res.ok) {
      await parseError(res);
    }
    if (!res.body) {
      throw new ApiError(res.status, "stream response has no body");
    }
    return res.body;
  }
}
