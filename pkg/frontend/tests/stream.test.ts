import { describe, expect, it } from "vitest";

import { LatestWins, parseNdjson, pumpSnapshots } from "../src/stream.js";
import type { Snapshot, StreamEvent } from "../src/types.js";
import { makeSnapshot, polygonPositions, streamOf } from "./fixtures.js";

function ndjson(events: unknown[]): string {
  return events.map((e) => JSON.stringify(e) + "\n").join("");
}

describe("parseNdjson", () => {
  it("parses events across awkward chunk boundaries", async () => {
    const events = [
      makeSnapshot(polygonPositions(5), 0),
      { type: "heartbeat", status: "running", iteration: 3 },
      makeSnapshot(polygonPositions(5), 10),
      { type: "end", status: "finished", iteration: 10, error: null },
    ];
    for (const chunkSize of [1, 3, 7, 1000]) {
      const got: StreamEvent[] = [];
      for await (const e of parseNdjson(streamOf(ndjson(events), chunkSize))) {
        got.push(e);
      }
      expect(got).toEqual(events);
    }
  });

  it("parses a trailing event with no final newline", async () => {
    const text = ndjson([{ type: "heartbeat", status: "paused", iteration: 0 }])
      + JSON.stringify({ type: "end", status: "stopped", iteration: 0, error: null });
    const got: StreamEvent[] = [];
    for await (const e of parseNdjson(streamOf(text, 5))) {
      got.push(e);
    }
    expect(got).toHaveLength(2);
    expect(got[1]!.type).toBe("end");
  });

  it("skips blank lines", async () => {
    const text = "\n" + ndjson([makeSnapshot(polygonPositions(3), 0)]) + "\n\n";
    const got: StreamEvent[] = [];
    for await (const e of parseNdjson(streamOf(text, 4))) {
      got.push(e);
    }
    expect(got).toHaveLength(1);
  });
});

describe("pumpSnapshots", () => {
  it("delivers snapshots to the mailbox and stops on end", async () => {
    const snaps = Array.from({ length: 8 }, (_, i) =>
      makeSnapshot(polygonPositions(4), i * 10),
    );
    const events: unknown[] = [
      ...snaps,
      { type: "end", status: "finished", iteration: 70, error: null },
    ];
    const mailbox = new LatestWins<Snapshot>();
    const seen: string[] = [];
    const last = await pumpSnapshots(
      streamOf(ndjson(events), 11),
      mailbox,
      (e) => seen.push(e.type),
    );
    expect(last?.type).toBe("end");
    expect(seen.filter((t) => t === "snapshot")).toHaveLength(8);
    // only the newest snapshot is left for the renderer
    expect(mailbox.take()?.iteration).toBe(70);
    expect(mailbox.take()).toBeNull();
  });

  it("returns the last event when the stream ends without a terminal event", async () => {
    const events = [makeSnapshot(polygonPositions(4), 5)];
    const mailbox = new LatestWins<Snapshot>();
    const last = await pumpSnapshots(streamOf(ndjson(events)), mailbox);
    expect(last?.type).toBe("snapshot");
  });
});

describe("LatestWins", () => {
  it("overwrites older values and clears on take", () => {
    const box = new LatestWins<number>();
    expect(box.take()).toBeNull();
    for (let i = 0; i < 60; i++) {
      box.push(i);
    }
    expect(box.peek()).toBe(59);
    expect(box.take()).toBe(59);
    expect(box.take()).toBeNull();
  });
});
