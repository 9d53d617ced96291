// Test doubles: a virtual clock the tests drive by hand, an in-memory
// server speaking the experiment-service protocol, and spies for the
// stage and capture seams.

import type { FetchLike } from "../src/api.js";
import type { CaptureResult, ResponseCapture } from "../src/capture.js";
import type { Stage } from "../src/stage.js";
import type { Clock } from "../src/timing.js";
import type {
  PhaseStampWire,
  ResponseRecordWire,
  ScheduleEntry,
  TrialView,
} from "../src/types.js";

export class VirtualClock implements Clock {
  private t = 0;
  private pending: { at: number; resolve: () => void }[] = [];

  /** `lateBy` models timer lateness: each wait fires that much past target. */
  constructor(private readonly lateBy: () => number = () => 0) {}

  now(): number {
    return this.t;
  }

  wait(untilMs: number): Promise<void> {
    if (untilMs <= this.t) {
      return Promise.resolve();
    }
    return new Promise((resolve) => {
      this.pending.push({ at: untilMs + this.lateBy(), resolve });
    });
  }

  fireNext(): boolean {
    if (this.pending.length === 0) {
      return false;
    }
    this.pending.sort((a, b) => a.at - b.at);
    const next = this.pending.shift()!;
    this.t = Math.max(this.t, next.at);
    next.resolve();
    return true;
  }
}

async function flushMicrotasks(): Promise<void> {
  for (let i = 0; i < 32; i++) {
    await Promise.resolve();
  }
}

/** Pump the virtual clock until `promise` settles. */
export async function drive<T>(
  clock: VirtualClock,
  promise: Promise<T>,
  maxSteps = 100_000,
): Promise<T> {
  let settled = false;
  promise.then(
    () => (settled = true),
    () => (settled = true),
  );
  for (let step = 0; step < maxSteps; step++) {
    await flushMicrotasks();
    if (settled) {
      return promise;
    }
    if (!clock.fireNext()) {
      await flushMicrotasks();
      if (settled) {
        return promise;
      }
      throw new Error("deadlock: no timers pending but the task never settled");
    }
  }
  throw new Error(`still running after ${maxSteps} clock steps`);
}

export interface FakeStimulus {
  trial: string;
  sentence: string;
  image: string;
}

export function stimuli(n: number, prefix: string): FakeStimulus[] {
  return Array.from({ length: n }, (_, i) => {
    const trial = `${prefix}${i + 1}`;
    return {
      trial,
      sentence: `Zin voor ${trial}.`,
      image: `assets/${trial}.png`,
    };
  });
}

const VT_SCHEDULE: ScheduleEntry[] = [
  { phase: "fixation", duration_ms: 200 },
  { phase: "image", duration_ms: 1000 },
  { phase: "sentence", duration_ms: 2000 },
  { phase: "record", duration_ms: 4000 },
];
const OT_SCHEDULE: ScheduleEntry[] = [
  { phase: "fixation", duration_ms: 200 },
  { phase: "sentence", duration_ms: 2000 },
  { phase: "record", duration_ms: 4000 },
];

interface FakeServerConfig {
  session: string;
  condition: "VT" | "OT";
  practice: FakeStimulus[];
  main: FakeStimulus[];
  scheduleOverride?: ScheduleEntry[];
}

export class FakeServer {
  responses: ResponseRecordWire[] = [];
  events: object[] = [];
  requests: { method: string; path: string }[] = [];
  private position = 0;
  private completed = 0;
  private readonly sequence: { item: FakeStimulus; isPractice: boolean }[];

  constructor(private readonly cfg: FakeServerConfig) {
    this.sequence = [
      ...cfg.practice.map((item) => ({ item, isPractice: true })),
      ...cfg.main.map((item) => ({ item, isPractice: false })),
    ];
  }

  get state(): string {
    if (this.completed >= this.sequence.length) {
      return "done";
    }
    return this.sequence[this.completed]!.isPractice ? "practice" : "main";
  }

  schedule(): ScheduleEntry[] {
    if (this.cfg.scheduleOverride !== undefined) {
      return this.cfg.scheduleOverride;
    }
    return this.cfg.condition === "VT" ? VT_SCHEDULE : OT_SCHEDULE;
  }

  handle(
    method: string,
    url: string,
    body: unknown,
  ): { status: number; payload: unknown } {
    const path = new URL(url).pathname;
    this.requests.push({ method, path });
    const match = path.match(/^\/session\/([^/]+)\/(next|status|response|event)$/);
    if (match === null) {
      return { status: 404, payload: { error: "http.404", detail: "no route" } };
    }
    const [, sid, op] = match;
    if (sid !== this.cfg.session) {
      return {
        status: 404,
        payload: {
          error: "experiment.UnknownSession",
          detail: `unknown session '${sid}'`,
        },
      };
    }
    if (op === "status") {
      return {
        status: 200,
        payload: {
          state: this.state,
          completed: this.completed,
          remaining: this.sequence.length - this.completed,
        },
      };
    }
    if (op === "event") {
      this.events.push(body as object);
      return { status: 200, payload: { position: this.position++ } };
    }
    if (op === "next") {
      return { status: 200, payload: this.next() };
    }
    return this.submit(body as ResponseRecordWire);
  }

  private next(): unknown {
    if (this.completed >= this.sequence.length) {
      return { state: "done" };
    }
    const { item, isPractice } = this.sequence[this.completed]!;
    const payload: Record<string, unknown> = {
      state: this.state,
      trial: item.trial,
      is_practice: isPractice,
      sentence: item.sentence,
      schedule: this.schedule(),
      position: this.completed,
    };
    if (this.cfg.condition === "VT") {
      payload["image"] = item.image;
    }
    return payload;
  }

  private reject(code: string, detail: string): { status: number; payload: unknown } {
    return { status: 400, payload: { error: code, detail } };
  }

  private submit(record: ResponseRecordWire): { status: number; payload: unknown } {
    if (record.session !== this.cfg.session) {
      return this.reject("experiment.BadRecord", "record addresses another session");
    }
    if (this.responses.some((r) => r.trial === record.trial)) {
      return this.reject(
        "experiment.Duplicate",
        `trial '${record.trial}' already has a response`,
      );
    }
    if (this.completed >= this.sequence.length) {
      return this.reject("experiment.OutOfOrder", "session is complete");
    }
    const expected = this.sequence[this.completed]!;
    if (record.trial !== expected.item.trial) {
      return this.reject(
        "experiment.OutOfOrder",
        `expected trial '${expected.item.trial}', got '${record.trial}'`,
      );
    }
    if (record.is_practice !== expected.isPractice) {
      return this.reject("experiment.BadRecord", "is_practice mismatch");
    }
    const want = this.schedule().map((e) => e.phase);
    const got = (record.phase_timestamps ?? []).map((s) => s.phase);
    if (want.join(",") !== got.join(",")) {
      return this.reject(
        "experiment.BadRecord",
        `phase sequence must be ${want.join(",")}`,
      );
    }
    const flags = record.phase_timestamps
      .filter((stamp: PhaseStampWire, i: number) => {
        const planned = this.schedule()[i]!.duration_ms;
        return Math.abs(stamp.end_ms - stamp.start_ms - planned) > 50;
      })
      .map((stamp) => stamp.phase);
    this.responses.push(record);
    this.completed += 1;
    return { status: 200, payload: { position: this.position++, timing_flags: flags } };
  }
}

/**
 * fetch over the fake server. Trials named in `dropFirstReplyFor` have
 * their first /response reply lost AFTER the server processed it — the
 * scenario that makes idempotent resubmission necessary.
 */
export function fetchFor(
  server: FakeServer,
  opts: { dropFirstReplyFor?: Iterable<string> } = {},
): FetchLike {
  const drop = new Set(opts.dropFirstReplyFor ?? []);
  return async (url, init = {}) => {
    const method = init.method ?? "GET";
    const body: unknown =
      init.body === undefined ? undefined : JSON.parse(init.body);
    const { status, payload } = server.handle(method, url, body);
    if (
      new URL(url).pathname.endsWith("/response") &&
      typeof body === "object" &&
      body !== null &&
      drop.delete((body as ResponseRecordWire).trial)
    ) {
      throw new TypeError("network dropped the reply");
    }
    return {
      status,
      ok: status >= 200 && status < 300,
      json: async () => payload,
    };
  };
}

export interface StageEvent {
  at: number;
  kind: string;
  payload: string | null;
}

export class RecordingStage implements Stage {
  log: StageEvent[] = [];

  constructor(private readonly clock: Clock) {}

  present(view: TrialView): void {
    this.log.push({ at: this.clock.now(), kind: view.phase, payload: view.payload });
  }

  clear(): void {
    this.log.push({ at: this.clock.now(), kind: "clear", payload: null });
  }

  /** Log entries split into per-trial runs at each `clear`. */
  trials(): StageEvent[][] {
    const out: StageEvent[][] = [];
    let current: StageEvent[] = [];
    for (const entry of this.log) {
      current.push(entry);
      if (entry.kind === "clear") {
        out.push(current);
        current = [];
      }
    }
    if (current.length > 0) {
      out.push(current);
    }
    return out;
  }
}

export class FakeCapture implements ResponseCapture {
  readonly mode = "text";
  starts: { trial: string; at: number }[] = [];
  stops: number[] = [];

  constructor(private readonly clock: Clock) {}

  start(trial: string): void {
    this.starts.push({ trial, at: this.clock.now() });
  }

  async stop(): Promise<CaptureResult> {
    this.stops.push(this.clock.now());
    const last = this.starts[this.starts.length - 1];
    return { transcript: `typed:${last?.trial ?? "?"}`, audioRef: null };
  }
}
