import { LineupDraft, type DraftView, type PredictFn } from "./draft.js";
import { renderVotePanel } from "./votePanel.js";
import type { PlayerSummary } from "./types.js";

/**
 * What-if lineup builder: pick five players from the eligible roster, read
 * the seven subclassifier votes and the ensemble verdict, swap players and
 * watch the panel update. All verdicts come from the service.
 */
export class LineupBuilder {
  readonly draft: LineupDraft;
  private readonly byId = new Map<string, PlayerSummary>();

  constructor(
    private readonly root: HTMLElement,
    roster: PlayerSummary[],
    predict: PredictFn,
  ) {
    for (const player of roster) this.byId.set(player.id, player);
    this.draft = new LineupDraft(
      predict,
      new Set(this.byId.keys()),
      (view) => this.render(view),
    );
    this.render(this.draft.view());
  }

  select(player: string): void {
    this.draft.select(player);
  }

  private render(view: DraftView): void {
    this.root.textContent = "";

    const slots = document.createElement("div");
    slots.className = "slots";
    for (const pid of view.selected) {
      const chip = document.createElement("button");
      chip.className = "slot filled";
      chip.dataset.player = pid;
      chip.textContent = `${pid} ✕`;
      chip.addEventListener("click", () => this.draft.remove(pid));
      slots.appendChild(chip);
    }
    for (let i = view.selected.length; i < 5; i += 1) {
      const empty = document.createElement("span");
      empty.className = "slot empty";
      empty.textContent = "—";
      slots.appendChild(empty);
    }
    this.root.appendChild(slots);

    if (view.blocked) {
      const note = document.createElement("p");
      note.className = "blocked";
      note.textContent = view.blocked;
      this.root.appendChild(note);
    }
    if (view.error) {
      const note = document.createElement("p");
      note.className = "error";
      note.textContent = view.error;
      this.root.appendChild(note);
    }
    if (view.pending) {
      const note = document.createElement("p");
      note.className = "pending";
      note.textContent = "asking the ensemble…";
      this.root.appendChild(note);
    }
    if (view.verdict) {
      this.root.appendChild(renderVotePanel(view.verdict.votes, view.verdict.label));
      this.root.appendChild(renderOrderStats(view.verdict.order_stats));
    }

    const list = document.createElement("ul");
    list.className = "roster";
    for (const player of this.byId.values()) {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.dataset.player = player.id;
      button.textContent = `${player.id} (${player.team}, pmm ${player.pmm.toFixed(2)})`;
      button.addEventListener("click", () => this.draft.select(player.id));
      item.appendChild(button);
      list.appendChild(item);
    }
    this.root.appendChild(list);
  }
}

function renderOrderStats(orderStats: Record<string, number[]>): HTMLElement {
  const table = document.createElement("table");
  table.className = "order-stats";
  const head = table.insertRow();
  head.insertCell().textContent = "statistic";
  for (let i = 1; i <= 5; i += 1) head.insertCell().textContent = `(${i})`;
  for (const [stat, values] of Object.entries(orderStats)) {
    const row = table.insertRow();
    row.insertCell().textContent = stat;
    for (const value of values) row.insertCell().textContent = value.toFixed(3);
  }
  return table;
}
