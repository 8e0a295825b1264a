/** Labeling view: shows one word at a time with three tag buttons and the
 * 1/2/3 keyboard shortcuts. The display never gets ahead of the server: it
 * advances only after the vote is acknowledged. */

import { ApiError, TAGS, TagValue } from "../api";
import { Session } from "../session";

const TAG_KEYS: Record<string, TagValue> = { "1": "wal", "2": "gof", "3": "wal-gof" };

const GUIDELINES: Record<TagValue, string> = {
  wal: "the word occurs only in Wolayta",
  gof: "the word occurs only in Gofa",
  "wal-gof": "the word form is shared by both languages",
};

export class LabelingView {
  private buttons = new Map<TagValue, HTMLButtonElement>();
  private wordEl!: HTMLElement;
  private batchEl!: HTMLElement;
  private submittedEl!: HTMLElement;
  private skipEl!: HTMLButtonElement;
  private noticeEl!: HTMLElement;
  private errorEl!: HTMLElement;
  private errorDetailEl!: HTMLElement;
  private doneEl!: HTMLElement;
  private errorDetail: string | null = null;
  private lastTag: TagValue | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly session: Session,
  ) {}

  async mount(): Promise<void> {
    this.build();
    document.addEventListener("keydown", this.onKey);
    if (this.session.queue.length === 0) {
      try {
        await this.session.refill();
      } catch (err) {
        this.errorDetail = describe(err);
      }
    }
    this.render();
  }

  unmount(): void {
    document.removeEventListener("keydown", this.onKey);
    this.root.innerHTML = "";
  }

  private build(): void {
    this.root.innerHTML = `
      <section class="labeling">
        <header class="labeling-header">
          <span class="batch"></span>
          <span class="submitted"></span>
        </header>
        <p class="word" aria-live="polite"></p>
        <div class="tag-buttons"></div>
        <p class="done" hidden>Batch complete: no items left for you.</p>
        <p class="notice" hidden></p>
        <p class="error" hidden>
          <span class="error-detail"></span>
          <button type="button" class="retry">Retry</button>
        </p>
        <details class="guidelines">
          <summary>Tagging guidelines</summary>
          <ul>
            ${TAGS.map(
              (tag, i) => `<li><kbd>${i + 1}</kbd> <b>${tag}</b>: ${GUIDELINES[tag]}.</li>`,
            ).join("\n")}
          </ul>
          <p>Judge the word form itself, not a sentence context. Skip when unsure.</p>
        </details>
      </section>`;
    this.wordEl = this.root.querySelector(".word") as HTMLElement;
    this.batchEl = this.root.querySelector(".batch") as HTMLElement;
    this.submittedEl = this.root.querySelector(".submitted") as HTMLElement;
    this.noticeEl = this.root.querySelector(".notice") as HTMLElement;
    this.errorEl = this.root.querySelector(".error") as HTMLElement;
    this.errorDetailEl = this.root.querySelector(".error-detail") as HTMLElement;
    this.doneEl = this.root.querySelector(".done") as HTMLElement;

    const buttonRow = this.root.querySelector(".tag-buttons") as HTMLElement;
    TAGS.forEach((tag, i) => {
      const button = document.createElement("button");
      button.type = "button";
      button.className = "tag-button";
      button.dataset.tag = tag;
      button.innerHTML = `${tag} <kbd>${i + 1}</kbd>`;
      button.addEventListener("click", () => void this.submit(tag));
      buttonRow.appendChild(button);
      this.buttons.set(tag, button);
    });
    this.skipEl = document.createElement("button");
    this.skipEl.type = "button";
    this.skipEl.className = "skip";
    this.skipEl.textContent = "Skip";
    this.skipEl.addEventListener("click", () => {
      this.session.skip();
      this.render();
    });
    buttonRow.appendChild(this.skipEl);
    const retry = this.root.querySelector(".retry") as HTMLButtonElement;
    retry.addEventListener("click", () => void this.retry());
  }

  /** Submit a tag for the word on screen and advance on acknowledgement. */
  async submit(tag: TagValue): Promise<void> {
    if (this.session.pending || this.session.current === null) return;
    this.lastTag = tag;
    this.errorDetail = null;
    const acked = this.session.label(tag);
    this.render();
    try {
      await acked;
    } catch (err) {
      this.errorDetail = describe(err);
    }
    if (this.errorDetail === null && this.session.current === null) {
      try {
        await this.session.refill();
      } catch {
        // Refill failure with an empty queue just shows the batch-complete
        // state; nothing is queued while the server is unreachable.
      }
    }
    this.render();
  }

  private async retry(): Promise<void> {
    if (this.lastTag !== null && this.session.current !== null) {
      await this.submit(this.lastTag);
      return;
    }
    this.errorDetail = null;
    try {
      await this.session.refill();
    } catch (err) {
      this.errorDetail = describe(err);
    }
    this.render();
  }

  private onKey = (event: KeyboardEvent): void => {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) return;
    const tag = TAG_KEYS[event.key];
    if (tag !== undefined) void this.submit(tag);
  };

  render(): void {
    const item = this.session.current;
    const blocked = this.session.pending || item === null;
    for (const button of this.buttons.values()) button.disabled = blocked;
    this.skipEl.disabled = blocked;
    this.wordEl.textContent = item ? item.word : "";
    this.batchEl.textContent = item ? `batch ${item.batch}` : "";
    this.submittedEl.textContent = `${this.session.submitted} labeled`;
    this.doneEl.hidden = item !== null;
    const conflict = this.session.lastConflict;
    this.noticeEl.hidden = conflict === null;
    if (conflict !== null) {
      this.noticeEl.textContent = `"${conflict.item.word}" was skipped: ${conflict.detail}`;
    }
    this.errorEl.hidden = this.errorDetail === null;
    if (this.errorDetail !== null) this.errorDetailEl.textContent = this.errorDetail;
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.offline ? "server unreachable; vote not recorded" : err.message;
  }
  return String(err);
}
