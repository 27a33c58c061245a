/** NDJSON stream consumption.
 *
 * The service can emit snapshots far faster than the display refreshes, so
 * consumption is split in two: an async parser that yields every event in
 * order, and a latest-wins mailbox the render loop drains once per frame.
 * A frame therefore always draws one complete snapshot (never a blend of
 * two) and decimation falls out of reading at display rate.
 */

import type { Snapshot, StreamEvent } from "./types.js";

/** Parse an NDJSON byte stream into events, tolerating chunk splits. */
export async function* parseNdjson(
  stream: ReadableStream<Uint8Array>,
): AsyncGenerator<StreamEvent> {
  const reader = stream.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  try {
    for (;;) {
      const { done, value } = await reader.read();
      if (done) {
        break;
      }
      buffer += decoder.decode(value, { stream: true });
      let nl;
      while ((nl = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, nl).trim();
        buffer = buffer.slice(nl + 1);
        if (line) {
          yield JSON.parse(line) as StreamEvent;
        }
      }
    }
    const tail = buffer.trim();
    if (tail) {
      yield JSON.parse(tail) as StreamEvent;
    }
  } finally {
    reader.releaseLock();
  }
}

/** Single-slot mailbox: writers overwrite, the reader takes the newest. */
export class LatestWins<T> {
  private slot: T | null = null;

  push(value: T): void {
    this.slot = value;
  }

  /** Return the newest value and clear the slot, or null if none arrived. */
  take(): T | null {
    const v = this.slot;
    this.slot = null;
    return v;
  }

  peek(): T | null {
    return this.slot;
  }
}

/** Drive a stream into a mailbox; resolves with the terminal event, if any. */
export async function pumpSnapshots(
  stream: ReadableStream<Uint8Array>,
  mailbox: LatestWins<Snapshot>,
  onEvent?: (event: StreamEvent) => void,
): Promise<StreamEvent | null> {
  let last: StreamEvent | null = null;
  for await (const event of parseNdjson(stream)) {
    last = event;
    if (event.type === "snapshot") {
      mailbox.push(event);
    }
    onEvent?.(event);
    if (event.type === "end") {
      break;
    }
  }
  return last;
}
