// Thin client for the experiment service. Network failures are retried
// with backoff; a Duplicate rejection on resubmission means the original
// POST already landed, so it is reported as success rather than thrown.

import type {
  NextPayload,
  ResponseRecordWire,
  SessionStatus,
  SubmitOutcome,
} from "./types.js";

export interface ResponseLike {
  status: number;
  ok: boolean;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<ResponseLike>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
  }
}

const DUPLICATE_CODE = "experiment.Duplicate";

interface ClientOptions {
  fetchFn?: FetchLike;
  /** Additional attempts after the first (network errors only). */
  retries?: number;
  backoffMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;
  private readonly retries: number;
  private readonly backoffMs: number;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(baseUrl: string, options: ClientOptions = {}) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchFn = options.fetchFn ?? ((url, init) => fetch(url, init));
    this.retries = options.retries ?? 3;
    this.backoffMs = options.backoffMs ?? 250;
    this.sleep = options.sleep ?? defaultSleep;
  }

  async nextTrial(session: string): Promise<NextPayload> {
    return (await this.request("GET", this.path(session, "next"))) as NextPayload;
  }

  async status(session: string): Promise<SessionStatus> {
    return (await this.request("GET", this.path(session, "status"))) as SessionStatus;
  }

  async submitResponse(record: ResponseRecordWire): Promise<SubmitOutcome> {
    try {
      const body = (await this.request(
        "POST",
        this.path(record.session, "response"),
        record,
      )) as { position: number; timing_flags: string[] };
      return {
        duplicate: false,
        position: body.position,
        timingFlags: body.timing_flags,
      };
    } catch (err) {
      if (err instanceof ApiError && err.code === DUPLICATE_CODE) {
        return { duplicate: true, position: null, timingFlags: [] };
      }
      throw err;
    }
  }

  async postEvent(session: string, payload: object): Promise<number> {
    const body = (await this.request(
      "POST",
      this.path(session, "event"),
      payload,
    )) as { position: number };
    return body.position;
  }

  private path(session: string, tail: string): string {
    return `${this.base}/session/${encodeURIComponent(session)}/${tail}`;
  }

  private async request(
    method: string,
    url: string,
    body?: object,
  ): Promise<unknown> {
    const init =
      body === undefined
        ? { method }
        : {
            method,
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
          };
    let lastError: unknown;
    for (let attempt = 0; attempt <= this.retries; attempt++) {
      if (attempt > 0) {
        await this.sleep(this.backoffMs * 2 ** (attempt - 1));
      }
      let response: ResponseLike;
      try {
        response = await this.fetchFn(url, init);
      } catch (err) {
        // no reply reached us; the server may or may not have processed
        // the request, which is why submissions must be idempotent
        lastError = err;
        continue;
      }
      if (response.ok) {
        return response.json();
      }
      const detail = (await response.json()) as {
        error?: string;
        detail?: string;
      };
      throw new ApiError(
        response.status,
        detail.error ?? `http.${response.status}`,
        detail.detail ?? "request rejected",
      );
    }
    throw lastError instanceof Error
      ? lastError
      : new Error(`request failed after ${this.retries + 1} attempts`);
  }
}
