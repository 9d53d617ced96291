// Phase scheduling against a monotonic clock. Each phase ends at an
// absolute target computed from the trial start, so a timer firing late
// shifts that one boundary without accumulating drift across phases.

import type { PhaseStampWire, ScheduleEntry } from "./types.js";

export interface Clock {
  /** Monotonic milliseconds; the origin is arbitrary. */
  now(): number;
  /** Resolve at or after the absolute instant `untilMs`. */
  wait(untilMs: number): Promise<void>;
}

export class SystemClock implements Clock {
  now(): number {
    return performance.now();
  }

  async wait(untilMs: number): Promise<void> {
    // setTimeout may fire early or late; loop until the target is reached
    for (;;) {
      const remaining = untilMs - this.now();
      if (remaining <= 0) {
        return;
      }
      await new Promise<void>((resolve) => setTimeout(resolve, remaining));
    }
  }
}

/**
 * Run one trial's phases in order. `present` is called exactly once at
 * each phase onset and must only do presentation work; anything slow
 * belongs before or after the trial so it cannot distort the timeline.
 *
 * Returns stamps with start/end relative to the trial start, shaped the
 * way the service expects them in a response record.
 */
export async function runPhases(
  schedule: ScheduleEntry[],
  clock: Clock,
  present: (entry: ScheduleEntry, startedAtMs: number) => void | Promise<void>,
): Promise<PhaseStampWire[]> {
  const stamps: PhaseStampWire[] = [];
  const t0 = clock.now();
  let target = t0;
  for (const entry of schedule) {
    const start = clock.now();
    await present(entry, start);
    target += entry.duration_ms;
    await clock.wait(target);
    stamps.push({
      phase: entry.phase,
      start_ms: start - t0,
      end_ms: clock.now() - t0,
    });
  }
  return stamps;
}
