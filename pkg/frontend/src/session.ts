// Drives one participant session end to end: fetch the pending trial,
// present its phases against the clock, capture the response window,
// submit the actual timestamps, repeat until the service reports done.
//
// All network I/O happens between trials; inside a trial the only awaits
// are clock waits and the (cheap) capture start, so a slow server cannot
// stretch a phase.

import type { ApiClient } from "./api.js";
import type { ResponseCapture } from "./capture.js";
import type { Clock } from "./timing.js";
import { runPhases } from "./timing.js";
import type { Stage } from "./stage.js";
import type {
  ScheduleEntry,
  SessionStatus,
  SubmitOutcome,
  TrialPayload,
  TrialView,
} from "./types.js";
import { isDone } from "./types.js";

export interface SubmittedTrial {
  trial: string;
  outcome: SubmitOutcome;
}

export interface SessionResult {
  submitted: SubmittedTrial[];
  status: SessionStatus;
}

export class ProtocolError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ProtocolError";
  }
}

function viewFor(
  entry: ScheduleEntry,
  trial: TrialPayload,
  startedAtMs: number,
): TrialView {
  let payload: string | null;
  switch (entry.phase) {
    case "fixation":
    case "record":
      payload = null;
      break;
    case "sentence":
      payload = trial.sentence;
      break;
    case "image":
      if (trial.image === undefined) {
        throw new ProtocolError(
          `trial ${trial.trial} schedules an image phase but carries no image`,
        );
      }
      payload = trial.image;
      break;
    default:
      throw new ProtocolError(`unknown phase ${String(entry.phase)}`);
  }
  return {
    phase: entry.phase,
    payload,
    planned_ms: entry.duration_ms,
    started_at_ms: startedAtMs,
  };
}

export async function runSession(deps: {
  api: ApiClient;
  session: string;
  stage: Stage;
  capture: ResponseCapture;
  clock: Clock;
}): Promise<SessionResult> {
  const { api, session, stage, capture, clock } = deps;
  const submitted: SubmittedTrial[] = [];

  for (;;) {
    const next = await api.nextTrial(session);
    if (isDone(next)) {
      break;
    }
    const trial = next;

    const stamps = await runPhases(trial.schedule, clock, (entry, start) => {
      stage.present(viewFor(entry, trial, start));
      if (entry.phase === "record") {
        return capture.start(trial.trial);
      }
    });

    const response = await capture.stop();
    stage.clear();

    const outcome = await api.submitResponse({
      session,
      trial: trial.trial,
      is_practice: trial.is_practice,
      transcript: response.transcript,
      audio_ref: response.audioRef,
      phase_timestamps: stamps,
      submitted_at: clock.now(),
    });
    submitted.push({ trial: trial.trial, outcome });
  }

  return { submitted, status: await api.status(session) };
}
