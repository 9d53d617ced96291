// Browser entry point. Configuration comes from the URL:
//   ?session=s-p1            (required)
//   &server=http://host:port (defaults to the page's own origin, which is
//                             right when the service itself serves /ui)

import { ApiClient } from "./api.js";
import type { AudioBackend, RecorderLike, StreamLike } from "./capture.js";
import { chooseCapture } from "./capture.js";
import { runSession } from "./session.js";
import { DomStage } from "./stage.js";
import { SystemClock } from "./timing.js";

function wrapRecorder(stream: StreamLike): RecorderLike {
  const recorder = new MediaRecorder(stream as MediaStream, {
    mimeType: "audio/webm",
  });
  const like: RecorderLike = {
    start: () => recorder.start(),
    stop: () => recorder.stop(),
    ondataavailable: null,
    onstop: null,
  };
  recorder.ondataavailable = (event) =>
    like.ondataavailable?.({ data: event.data });
  recorder.onstop = () => like.onstop?.();
  return like;
}

function browserAudioBackend(): AudioBackend | null {
  if (
    typeof MediaRecorder === "undefined" ||
    !navigator.mediaDevices?.getUserMedia
  ) {
    return null;
  }
  return {
    openStream: () => navigator.mediaDevices.getUserMedia({ audio: true }),
    makeRecorder: wrapRecorder,
  };
}

async function boot(): Promise<void> {
  const root = document.getElementById("stage");
  if (root === null) {
    throw new Error("missing #stage element");
  }
  const stage = new DomStage(root);

  const params = new URLSearchParams(window.location.search);
  const session = params.get("session");
  if (session === null) {
    stage.showMessage("Missing ?session= parameter.");
    return;
  }
  const server = params.get("server") ?? window.location.origin;
  const api = new ApiClient(server);

  const capture = await chooseCapture(
    browserAudioBackend(),
    async (trial, base64) => {
      const position = await api.postEvent(session, {
        kind: "audio",
        trial,
        encoding: "base64",
        data: base64,
      });
      return `event:${position}`;
    },
    () => stage.textEntryValue(),
  );
  if (capture.mode === "text") {
    stage.enableTextEntry();
  }

  document.addEventListener("visibilitychange", () => {
    api
      .postEvent(session, {
        kind: "visibility",
        state: document.visibilityState,
        at_ms: performance.now(),
      })
      .catch(() => {});
  });

  stage.showMessage("Press any key to begin.");
  await new Promise<void>((resolve) => {
    window.addEventListener("keydown", () => resolve(), { once: true });
  });

  const result = await runSession({
    api,
    session,
    stage,
    capture,
    clock: new SystemClock(),
  });
  stage.showMessage(
    `Session complete (${result.status.completed} trials). Thank you!`,
  );
}

boot().catch((err) => {
  const root = document.getElementById("stage");
  if (root !== null) {
    new DomStage(root).showMessage("Something went wrong — please tell the experimenter.");
  }
  console.error(err);
});

// dispose note: the capture stream stays open for the whole session on
// purpose; re-prompting for the microphone mid-session would wreck timing
