/** Progress view: renders the service's progress payload verbatim, with no
 * client-side arithmetic, so the screen always matches the store. */

import { ApiClient, Progress } from "../api";

export class ProgressView {
  private totalEl!: HTMLElement;
  private statusBody!: HTMLElement;
  private tagBody!: HTMLElement;
  private errorEl!: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  async mount(): Promise<void> {
    this.root.innerHTML = `
      <section class="progress">
        <header class="progress-header">
          <h2>Progress</h2>
          <button type="button" class="refresh">Refresh</button>
        </header>
        <p class="total"></p>
        <h3>Items by status</h3>
        <table class="by-status"><tbody></tbody></table>
        <h3>Decided tags</h3>
        <table class="by-tag">
          <thead><tr><th>tag</th><th>count</th><th>fraction</th></tr></thead>
          <tbody></tbody>
        </table>
        <p class="error" hidden></p>
      </section>`;
    this.totalEl = this.root.querySelector(".total") as HTMLElement;
    this.statusBody = this.root.querySelector(".by-status tbody") as HTMLElement;
    this.tagBody = this.root.querySelector(".by-tag tbody") as HTMLElement;
    this.errorEl = this.root.querySelector(".error") as HTMLElement;
    const refresh = this.root.querySelector(".refresh") as HTMLButtonElement;
    refresh.addEventListener("click", () => void this.refresh());
    await this.refresh();
  }

  unmount(): void {
    this.root.innerHTML = "";
  }

  async refresh(): Promise<void> {
    let data: Progress;
    try {
      data = await this.api.progress();
    } catch (err) {
      this.errorEl.hidden = false;
      this.errorEl.textContent = String(err);
      return;
    }
    this.errorEl.hidden = true;
    this.totalEl.textContent = `${data.total} items`;
    this.statusBody.innerHTML = "";
    for (const [status, count] of Object.entries(data.by_status)) {
      const row = document.createElement("tr");
      row.dataset.status = status;
      row.innerHTML = `<th>${status}</th><td class="count">${count}</td>`;
      this.statusBody.appendChild(row);
    }
    this.tagBody.innerHTML = "";
    for (const [tag, count] of Object.entries(data.decided_tags.counts)) {
      const row = document.createElement("tr");
      row.dataset.tag = tag;
      row.innerHTML =
        `<th>${tag}</th><td class="count">${count}</td>` +
        `<td class="fraction">${data.decided_tags.fractions[tag]}</td>`;
      this.tagBody.appendChild(row);
    }
  }
}
