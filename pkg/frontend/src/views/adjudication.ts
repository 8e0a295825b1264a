/** Adjudication view: lists items whose three votes disagree three ways and
 * lets the adjudicator decide them. A card disappears only after the server
 * acknowledges the decision. */

import { ApiClient, Disagreement, TAGS, TagValue } from "../api";

export class AdjudicationView {
  private listEl!: HTMLElement;
  private emptyEl!: HTMLElement;
  private errorEl!: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly adjudicator: string,
  ) {}

  async mount(): Promise<void> {
    this.root.innerHTML = `
      <section class="adjudication">
        <header class="adjudication-header">
          <h2>Adjudication</h2>
          <button type="button" class="refresh">Refresh</button>
        </header>
        <p class="empty" hidden>No items awaiting adjudication.</p>
        <p class="error" hidden></p>
        <div class="cards"></div>
      </section>`;
    this.listEl = this.root.querySelector(".cards") as HTMLElement;
    this.emptyEl = this.root.querySelector(".empty") as HTMLElement;
    this.errorEl = this.root.querySelector(".error") as HTMLElement;
    const refresh = this.root.querySelector(".refresh") as HTMLButtonElement;
    refresh.addEventListener("click", () => void this.refresh());
    await this.refresh();
  }

  unmount(): void {
    this.root.innerHTML = "";
  }

  async refresh(): Promise<void> {
    let items: Disagreement[];
    try {
      items = await this.api.disagreements();
    } catch (err) {
      this.errorEl.hidden = false;
      this.errorEl.textContent = String(err);
      return;
    }
    this.errorEl.hidden = true;
    this.listEl.innerHTML = "";
    for (const item of items) this.listEl.appendChild(this.card(item));
    this.renderEmpty();
  }

  private card(item: Disagreement): HTMLElement {
    const card = document.createElement("article");
    card.className = "card";
    card.dataset.itemId = item.item_id;
    const votes = item.votes
      .map((v) => `<li><span class="voter">${v.annotator}</span>: <b>${v.tag}</b></li>`)
      .join("\n");
    card.innerHTML = `
      <p class="word">${item.word}</p>
      <ul class="votes">${votes}</ul>
      <div class="decide-buttons"></div>
      <p class="card-error" hidden></p>`;
    const buttonRow = card.querySelector(".decide-buttons") as HTMLElement;
    for (const tag of TAGS) {
      const button = document.createElement("button");
      button.type = "button";
      button.className = "decide";
      button.dataset.tag = tag;
      button.textContent = tag;
      button.addEventListener("click", () => void this.decide(card, item, tag));
      buttonRow.appendChild(button);
    }
    return card;
  }

  private async decide(card: HTMLElement, item: Disagreement, tag: TagValue): Promise<void> {
    const buttons = card.querySelectorAll<HTMLButtonElement>("button.decide");
    for (const b of buttons) b.disabled = true;
    const errorEl = card.querySelector(".card-error") as HTMLElement;
    try {
      await this.api.adjudicate(item.item_id, tag, this.adjudicator);
    } catch (err) {
      errorEl.hidden = false;
      errorEl.textContent = String(err);
      for (const b of buttons) b.disabled = false;
      return;
    }
    card.remove();
    this.renderEmpty();
  }

  private renderEmpty(): void {
    this.emptyEl.hidden = this.listEl.childElementCount > 0;
  }
}
