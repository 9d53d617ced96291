// What the participant sees. The runner talks to this interface only;
// the DOM implementation keeps the screen minimal — neutral background,
// one central element — so nothing on screen hints at trial progress.

import type { TrialView } from "./types.js";

export interface Stage {
  present(view: TrialView): void;
  clear(): void;
}

export class DomStage implements Stage {
  private textEntry = false;
  private input: HTMLInputElement | null = null;

  constructor(private readonly root: HTMLElement) {}

  /** Show a typing box during record phases (microphone fallback). */
  enableTextEntry(): void {
    this.textEntry = true;
  }

  /** What the participant typed during the last record window. */
  textEntryValue(): string {
    return this.input?.value ?? "";
  }

  present(view: TrialView): void {
    switch (view.phase) {
      case "fixation": {
        this.swap(this.elem("div", "fixation", "+"));
        return;
      }
      case "image": {
        const img = document.createElement("img");
        img.className = "stimulus-image";
        // the URI is only assigned now, at phase onset, so the asset is
        // never requested during earlier phases
        img.src = view.payload ?? "";
        img.alt = "";
        this.swap(img);
        return;
      }
      case "sentence": {
        this.swap(this.elem("div", "sentence", view.payload ?? ""));
        return;
      }
      case "record": {
        const wrap = document.createElement("div");
        wrap.className = "record-cue";
        const dot = this.elem("div", "record-dot", "");
        dot.setAttribute("role", "status");
        dot.setAttribute("aria-label", "recording");
        wrap.appendChild(dot);
        if (this.textEntry) {
          const input = document.createElement("input");
          input.type = "text";
          input.className = "text-entry";
          input.autocomplete = "off";
          wrap.appendChild(input);
          this.input = input;
          this.swap(wrap);
          input.focus();
          return;
        }
        this.swap(wrap);
        return;
      }
    }
  }

  clear(): void {
    this.root.replaceChildren();
  }

  showMessage(text: string): void {
    this.swap(this.elem("div", "message", text));
  }

  private swap(element: HTMLElement): void {
    this.root.replaceChildren(element);
  }

  private elem(tag: string, className: string, text: string): HTMLElement {
    const el = document.createElement(tag);
    el.className = className;
    el.textContent = text;
    return el;
  }
}
