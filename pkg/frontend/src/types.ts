// Wire types for the translation-experiment service JSON API, plus the
// view model the runner hands to whatever renders a trial.

export type PhaseName = "fixation" | "image" | "sentence" | "record";

export interface ScheduleEntry {
  phase: PhaseName;
  duration_ms: number;
}

export interface TrialPayload {
  state: string;
  trial: string;
  is_practice: boolean;
  sentence: string;
  schedule: ScheduleEntry[];
  position: number;
  image?: string; // present only in VT sessions
}

export type NextPayload = TrialPayload | { state: "done" };

export function isDone(p: NextPayload): p is { state: "done" } {
  return p.state === "done";
}

export interface PhaseStampWire {
  phase: string;
  start_ms: number;
  end_ms: number;
}

export interface ResponseRecordWire {
  session: string;
  trial: string;
  is_practice: boolean;
  transcript: string | null;
  audio_ref: string | null;
  phase_timestamps: PhaseStampWire[];
  submitted_at: number;
}

export interface SessionStatus {
  state: string;
  completed: number;
  remaining: number;
}

export interface SubmitOutcome {
  // true when the server already had this trial's response (a retry landed
  // after the original was accepted); callers treat both paths as success
  duplicate: boolean;
  position: number | null;
  timingFlags: string[];
}

/** One phase as presented: what is on screen, for how long, from when. */
export interface TrialView {
  phase: PhaseName;
  payload: string | null; // image URI, sentence text, or null
  planned_ms: number;
  started_at_ms: number; // monotonic clock reading at phase onset
}
