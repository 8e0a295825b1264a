/** Application shell: annotator identity, tab routing between the three
 * views, and an offline banner when the service cannot be reached. */

import "./styles.css";
import { ApiClient, ApiError } from "./api";
import { Session } from "./session";
import { AdjudicationView } from "./views/adjudication";
import { LabelingView } from "./views/labeling";
import { ProgressView } from "./views/progress";

const STORAGE_KEY = "blid.annotator";

type TabName = "label" | "adjudicate" | "progress";

interface View {
  mount(): Promise<void>;
  unmount(): void;
}

class App {
  private readonly api = new ApiClient("");
  private annotator: string;
  private active: View | null = null;
  private tab: TabName = "label";
  private viewRoot!: HTMLElement;
  private bannerEl!: HTMLElement;
  private tabButtons = new Map<TabName, HTMLButtonElement>();

  constructor(private readonly root: HTMLElement) {
    this.annotator = localStorage.getItem(STORAGE_KEY) ?? "";
  }

  async start(): Promise<void> {
    this.root.innerHTML = `
      <header class="app-header">
        <h1>blid annotation</h1>
        <label class="identity">annotator
          <input type="text" class="annotator" placeholder="your name" />
        </label>
        <nav class="tabs"></nav>
      </header>
      <p class="banner" hidden>Server unreachable: read-only, nothing is queued.</p>
      <main class="view"></main>`;
    this.viewRoot = this.root.querySelector(".view") as HTMLElement;
    this.bannerEl = this.root.querySelector(".banner") as HTMLElement;

    const input = this.root.querySelector(".annotator") as HTMLInputElement;
    input.value = this.annotator;
    input.addEventListener("change", () => {
      this.annotator = input.value.trim();
      localStorage.setItem(STORAGE_KEY, this.annotator);
      void this.show(this.tab);
    });

    const tabs = this.root.querySelector(".tabs") as HTMLElement;
    const names: { tab: TabName; label: string }[] = [
      { tab: "label", label: "Label" },
      { tab: "adjudicate", label: "Adjudicate" },
      { tab: "progress", label: "Progress" },
    ];
    for (const { tab, label } of names) {
      const button = document.createElement("button");
      button.type = "button";
      button.className = "tab";
      button.dataset.tab = tab;
      button.textContent = label;
      button.addEventListener("click", () => void this.show(tab));
      tabs.appendChild(button);
      this.tabButtons.set(tab, button);
    }

    await this.ping();
    await this.show("label");
  }

  /** One reachability probe at startup drives the read-only banner. */
  private async ping(): Promise<void> {
    try {
      await this.api.annotators();
      this.bannerEl.hidden = true;
    } catch (err) {
      this.bannerEl.hidden = !(err instanceof ApiError && err.offline);
    }
  }

  private async show(tab: TabName): Promise<void> {
    this.tab = tab;
    for (const [name, button] of this.tabButtons) {
      button.classList.toggle("active", name === tab);
    }
    this.active?.unmount();
    this.viewRoot.innerHTML = "";
    if (tab === "progress") {
      this.active = new ProgressView(this.viewRoot, this.api);
    } else if (this.annotator === "") {
      this.viewRoot.innerHTML = `<p class="need-identity">Enter your annotator name above to start.</p>`;
      this.active = null;
      return;
    } else if (tab === "adjudicate") {
      this.active = new AdjudicationView(this.viewRoot, this.api, this.annotator);
    } else {
      this.active = new LabelingView(this.viewRoot, new Session(this.api, this.annotator));
    }
    await this.active.mount();
  }
}

const rootEl = document.getElementById("app");
if (rootEl !== null) {
  void new App(rootEl).start();
}
