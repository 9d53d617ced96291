import { expect, test } from "vitest";

import { runPhases } from "../src/timing.js";
import { drive, VirtualClock } from "./helpers.js";
import type { ScheduleEntry } from "../src/types.js";

const VT: ScheduleEntry[] = [
  { phase: "fixation", duration_ms: 200 },
  { phase: "image", duration_ms: 1000 },
  { phase: "sentence", duration_ms: 2000 },
  { phase: "record", duration_ms: 4000 },
];

test("with exact timers every stamp matches the plan to the millisecond", async () => {
  const clock = new VirtualClock();
  const seen: { phase: string; at: number }[] = [];
  const stamps = await drive(
    clock,
    runPhases(VT, clock, (entry, start) => {
      seen.push({ phase: entry.phase, at: start });
    }),
  );

  expect(stamps).toEqual([
    { phase: "fixation", start_ms: 0, end_ms: 200 },
    { phase: "image", start_ms: 200, end_ms: 1200 },
    { phase: "sentence", start_ms: 1200, end_ms: 3200 },
    { phase: "record", start_ms: 3200, end_ms: 7200 },
  ]);
  expect(seen.map((s) => s.phase)).toEqual([
    "fixation",
    "image",
    "sentence",
    "record",
  ]);
  expect(seen.map((s) => s.at)).toEqual([0, 200, 1200, 3200]);
});

test("uniformly late timers stretch only the first phase, not the whole trial", async () => {
  // every wait fires 30 ms past its target; absolute-target scheduling
  // means later phases start late AND end late, so their durations are
  // untouched and lateness never accumulates
  const clock = new VirtualClock(() => 30);
  const stamps = await drive(clock, runPhases(VT, clock, () => {}));

  const durations = stamps.map((s) => s.end_ms - s.start_ms);
  expect(durations).toEqual([230, 1000, 2000, 4000]);
  expect(stamps[3]!.end_ms).toBe(7230); // a relative scheduler would hit 7320
});

test("durations stay within twice the worst single-timer lateness", async () => {
  let seed = 99;
  const clock = new VirtualClock(() => {
    seed = (seed * 1103515245 + 12345) % 2 ** 31;
    return seed % 20;
  });
  const stamps = await drive(clock, runPhases(VT, clock, () => {}));

  stamps.forEach((stamp, i) => {
    const actual = stamp.end_ms - stamp.start_ms;
    expect(Math.abs(actual - VT[i]!.duration_ms)).toBeLessThanOrEqual(2 * 20);
  });
  expect(stamps[3]!.end_ms).toBeLessThanOrEqual(7200 + 20);
});

test("a zero-length schedule and zero-duration phases complete without waiting", async () => {
  const clock = new VirtualClock();
  expect(await runPhases([], clock, () => {})).toEqual([]);

  const instant = await runPhases(
    [{ phase: "fixation", duration_ms: 0 }],
    clock,
    () => {},
  );
  expect(instant).toEqual([{ phase: "fixation", start_ms: 0, end_ms: 0 }]);
});

test("the present hook may be async and runs before the phase wait starts", async () => {
  const clock = new VirtualClock();
  const order: string[] = [];
  const stamps = await drive(
    clock,
    runPhases(
      [{ phase: "record", duration_ms: 100 }],
      clock,
      async (entry) => {
        order.push(`present:${entry.phase}`);
      },
    ),
  );
  expect(order).toEqual(["present:record"]);
  expect(stamps[0]!.end_ms).toBe(100);
});
