import { renderVotePanel } from "./votePanel.js";
import type { EliteLineup } from "./types.js";

export interface TeamDepth {
  team: string;
  eliteCount: number;
  elite: EliteLineup[];
}

/** Teams ranked by predicted elite-lineup count, descending; equal counts
 * keep their input order (stable sort). */
export function rankTeams(teams: TeamDepth[]): TeamDepth[] {
  return [...teams].sort((a, b) => b.eliteCount - a.eliteCount);
}

/**
 * Bench-depth comparison: one bar per team, sorted by elite count; clicking
 * a team expands its elite lineups with their vote panels.
 */
export class DepthChart {
  private expanded: string | null = null;
  private teams: TeamDepth[] = [];

  constructor(private readonly root: HTMLElement) {
    this.render();
  }

  setTeams(teams: TeamDepth[]): void {
    this.teams = rankTeams(teams);
    if (!this.teams.some((t) => t.team === this.expanded)) {
      this.expanded = null;
    }
    this.render();
  }

  toggle(team: string): void {
    this.expanded = this.expanded === team ? null : team;
    this.render();
  }

  private render(): void {
    this.root.textContent = "";
    if (this.teams.length === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "no rosters loaded yet";
      this.root.appendChild(empty);
      return;
    }
    const max = Math.max(...this.teams.map((t) => t.eliteCount), 1);
    const list = document.createElement("ol");
    list.className = "depth-chart";
    for (const team of this.teams) {
      const item = document.createElement("li");
      item.dataset.team = team.team;

      const row = document.createElement("button");
      row.className = "team-row";
      row.addEventListener("click", () => this.toggle(team.team));
      const bar = document.createElement("span");
      bar.className = "bar";
      bar.style.width = `${(100 * team.eliteCount) / max}%`;
      const count = document.createElement("span");
      count.className = team.eliteCount === 0 ? "count zero-badge" : "count";
      count.textContent = String(team.eliteCount);
      row.append(team.team, " ", bar, count);
      item.appendChild(row);

      if (this.expanded === team.team) {
        const detail = document.createElement("ul");
        detail.className = "elite-lineups";
        for (const lineup of team.elite) {
          const entry = document.createElement("li");
          entry.textContent = lineup.players.join(", ");
          entry.appendChild(renderVotePanel(lineup.votes, "elite"));
          detail.appendChild(entry);
        }
        if (team.elite.length === 0) {
          const none = document.createElement("li");
          none.textContent = "no elite lineups";
          detail.appendChild(none);
        }
        item.appendChild(detail);
      }
      list.appendChild(item);
    }
    this.root.appendChild(list);
  }
}
