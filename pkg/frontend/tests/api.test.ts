import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { MockService, cycleGraph, isDocumentedCall, polygonPositions } from "./fixtures.js";

function makeClient() {
  const mock = new MockService(cycleGraph(10), polygonPositions(10));
  const api = new ApiClient("", mock.fetch);
  return { mock, api };
}

describe("ApiClient", () => {
  it("creates a session with the given body", async () => {
    const { mock, api } = makeClient();
    const desc = await api.createSession({
      family: { family: "cycle", n: 10 },
      weights: { ST: 1.0 },
    });
    expect(desc.id).toBe(mock.sessionId);
    expect(desc.positions).toHaveLength(10);
    expect(desc.graph.edges).toHaveLength(10);
    const calls = mock.callsTo("POST", "/sessions");
    expect(calls).toHaveLength(1);
    expect(calls[0]!.body).toEqual({
      family: { family: "cycle", n: 10 },
      weights: { ST: 1.0 },
    });
  });

  it("patches weights and posts drags at the documented paths", async () => {
    const { mock, api } = makeClient();
    const ack = await api.setWeights(mock.sessionId, { ST: 1, CN: 0.5 });
    expect(ack.ok).toBe(true);
    expect(ack.applies_at_iteration).toBeGreaterThan(mock.iteration);
    const drag = await api.dragNode(mock.sessionId, 3, 1.5, -0.5, 20);
    expect(drag.ok).toBe(true);
    expect(mock.callsTo("PATCH", "/weights")[0]!.body).toEqual({
      ST: 1,
      CN: 0.5,
    });
    expect(mock.callsTo("POST", "/drag")[0]!.body).toEqual({
      node: 3,
      x: 1.5,
      y: -0.5,
      hold: 20,
    });
  });

  it("raises ApiError with the server detail on failure", async () => {
    const { mock, api } = makeClient();
    mock.failNext("/weights", 400);
    await expect(api.setWeights(mock.sessionId, { ST: -1 })).rejects.toThrow(
      ApiError,
    );
    mock.failNext("/weights", 400);
    await expect(
      api.setWeights(mock.sessionId, { ST: -1 }),
    ).rejects.toMatchObject({ status: 400 });
  });

  it("only ever issues documented endpoints", async () => {
    const { mock, api } = makeClient();
    await api.createSession({ family: { family: "cycle", n: 10 } });
    await api.resume(mock.sessionId);
    await api.setWeights(mock.sessionId, { ST: 2 });
    await api.dragNode(mock.sessionId, 0, 0, 0);
    await api.pause(mock.sessionId);
    await api.getSession(mock.sessionId);
    const stream = await api.openStream(mock.sessionId);
    expect(stream).toBeInstanceOf(ReadableStream);
    await api.deleteSession(mock.sessionId);
    expect(mock.calls.length).toBe(8);
    for (const call of mock.calls) {
      expect(isDocumentedCall(call), `${call.method} ${call.path}`).toBe(true);
    }
  });
});
