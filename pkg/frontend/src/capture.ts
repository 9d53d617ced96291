// Spoken-response capture for the record window, with a text-entry
// fallback when no microphone is available or permission is denied.
// The audio backend is a narrow structural interface so the runner can
// be exercised without a real browser.

export interface CaptureResult {
  transcript: string | null;
  audioRef: string | null;
}

export interface ResponseCapture {
  readonly mode: "audio" | "text";
  /** Called once at the record-phase onset; must be cheap. */
  start(trial: string): void | Promise<void>;
  /** Called after the record phase ends; may do slow upload work. */
  stop(): Promise<CaptureResult>;
}

export interface BlobChunk {
  arrayBuffer(): Promise<ArrayBuffer>;
}

export interface RecorderLike {
  start(): void;
  stop(): void;
  ondataavailable: ((event: { data: BlobChunk }) => void) | null;
  onstop: (() => void) | null;
}

export interface StreamLike {
  getTracks(): { stop(): void }[];
}

export interface AudioBackend {
  /** Rejects when capture is unavailable or the participant declines. */
  openStream(): Promise<StreamLike>;
  makeRecorder(stream: StreamLike): RecorderLike;
}

/** Uploads recorded bytes and returns the reference to put in the record. */
export type AudioUploader = (trial: string, base64: string) => Promise<string>;

export class MediaRecorderCapture implements ResponseCapture {
  readonly mode = "audio";
  private recorder: RecorderLike | null = null;
  private chunks: BlobChunk[] = [];
  private currentTrial = "";

  constructor(
    private readonly stream: StreamLike,
    private readonly makeRecorder: (stream: StreamLike) => RecorderLike,
    private readonly upload: AudioUploader,
  ) {}

  start(trial: string): void {
    this.currentTrial = trial;
    this.chunks = [];
    const recorder = this.makeRecorder(this.stream);
    recorder.ondataavailable = (event) => {
      this.chunks.push(event.data);
    };
    this.recorder = recorder;
    recorder.start();
  }

  async stop(): Promise<CaptureResult> {
    const recorder = this.recorder;
    if (recorder === null) {
      throw new Error("capture was never started");
    }
    this.recorder = null;
    await new Promise<void>((resolve) => {
      recorder.onstop = resolve;
      recorder.stop();
    });
    const parts = await Promise.all(
      this.chunks.map((chunk) => chunk.arrayBuffer()),
    );
    const ref = await this.upload(this.currentTrial, concatToBase64(parts));
    return { transcript: null, audioRef: ref };
  }

  dispose(): void {
    for (const track of this.stream.getTracks()) {
      track.stop();
    }
  }
}

export class TextEntryCapture implements ResponseCapture {
  readonly mode = "text";

  /** `source` reads whatever the participant typed during the window. */
  constructor(private readonly source: () => string) {}

  start(_trial: string): void {}

  async stop(): Promise<CaptureResult> {
    return { transcript: this.source(), audioRef: null };
  }
}

/**
 * Prefer microphone capture; fall back to typed responses when the
 * backend is missing or the stream cannot be opened. The fallback choice
 * is surfaced through `mode` so it ends up recorded with each response.
 */
export async function chooseCapture(
  backend: AudioBackend | null,
  upload: AudioUploader,
  textSource: () => string,
): Promise<ResponseCapture> {
  if (backend === null) {
    return new TextEntryCapture(textSource);
  }
  let stream: StreamLike;
  try {
    stream = await backend.openStream();
  } catch {
    return new TextEntryCapture(textSource);
  }
  return new MediaRecorderCapture(
    stream,
    (s) => backend.makeRecorder(s),
    upload,
  );
}

function concatToBase64(parts: ArrayBuffer[]): string {
  const total = parts.reduce((n, p) => n + p.byteLength, 0);
  const bytes = new Uint8Array(total);
  let offset = 0;
  for (const part of parts) {
    bytes.set(new Uint8Array(part), offset);
    offset += part.byteLength;
  }
  // btoa takes a binary string; build it in slices to bound stack use
  let binary = "";
  const SLICE = 0x8000;
  for (let i = 0; i < bytes.length; i += SLICE) {
    binary += String.fromCharCode(...bytes.subarray(i, i + SLICE));
  }
  return btoa(binary);
}
