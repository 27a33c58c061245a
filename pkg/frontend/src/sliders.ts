/** Weight sliders: log-scale mapping and debounced weight updates.
 *
 * Useful criterion weights span orders of magnitude, so slider position 0-10
 * maps to weight logarithmically (5 is weight 1.0, 0 switches the criterion
 * off). Rapid slider movement coalesces into a single PATCH per debounce
 * window carrying the full weight map; the displayed values are optimistic
 * and fall back to the last server-acknowledged map if the PATCH fails.
 */

import type { ApiClient } from "./api.js";
import type { CriterionId, Weights } from "./types.js";

export const SLIDER_MAX = 10;
/** Slider position whose weight is exactly 1. */
export const SLIDER_UNIT = 5;
/** Decades covered on each side of weight 1 over the slider range. */
const DECADES_PER_HALF = 2;

export function weightFromSlider(position: number): number {
  const s = Math.max(0, Math.min(SLIDER_MAX, position));
  if (s === 0) {
    return 0;
  }
  return Math.pow(10, ((s - SLIDER_UNIT) / SLIDER_UNIT) * DECADES_PER_HALF);
}

export function sliderFromWeight(weight: number): number {
  if (weight <= 0) {
    return 0;
  }
  const s = SLIDER_UNIT + (Math.log10(weight) * SLIDER_UNIT) / DECADES_PER_HALF;
  return Math.max(0, Math.min(SLIDER_MAX, s));
}

export interface WeightControllerOptions {
  debounceMs?: number;
  onAck?: (weights: Weights, appliesAtIteration: number) => void;
  onRevert?: (weights: Weights, error: unknown) => void;
}

export class WeightController {
  private acknowledged: Weights;
  private pending: Weights | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inflight: Promise<void> = Promise.resolve();
  private readonly debounceMs: number;

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
    initialWeights: Weights,
    private readonly options: WeightControllerOptions = {},
  ) {
    this.acknowledged = { ...initialWeights };
    this.debounceMs = options.debounceMs ?? 150;
  }

  /** What the sliders should display right now. */
  get weights(): Weights {
    return { ...(this.pending ?? this.acknowledged) };
  }

  /** The last weight map the server confirmed. */
  get acknowledgedWeights(): Weights {
    return { ...this.acknowledged };
  }

  sliderChanged(criterion: CriterionId, position: number): void {
    const weight = weightFromSlider(position);
    this.pending = {
      ...(this.pending ?? this.acknowledged),
      [criterion]: weight,
    };
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.flush();
    }, this.debounceMs);
  }

  /** Send the pending map now (one PATCH); no-op when nothing changed. */
  flush(): Promise<void> {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (this.pending === null) {
      return this.inflight;
    }
    const toSend = this.pending;
    this.pending = null;
    // serialize sends so acks cannot arrive out of order
    this.inflight = this.inflight.then(async () => {
      try {
        const ack = await this.api.setWeights(this.sessionId, toSend);
        this.acknowledged = toSend;
        this.options.onAck?.(this.weights, ack.applies_at_iteration);
      } catch (error) {
        // pending was already cleared, so unless the user has moved again
        // the display falls back to the acknowledged map: a revert
        this.options.onRevert?.(this.weights, error);
      }
    });
    return this.inflight;
  }
}
