import type { Vote } from "./types.js";

/** Seven named votes plus the ensemble verdict, in the service's order. */
export function renderVotePanel(votes: Vote[], label: string): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "vote-panel";
  for (const vote of votes) {
    const chip = document.createElement("span");
    chip.className = `vote vote-${vote.vote}`;
    chip.dataset.family = vote.family;
    chip.textContent = `${vote.family}: ${vote.vote === "elite" ? "elite" : "not elite"}`;
    panel.appendChild(chip);
  }
  const verdict = document.createElement("strong");
  verdict.className = `verdict verdict-${label}`;
  verdict.textContent = label === "elite" ? "ELITE" : "NOT ELITE";
  panel.appendChild(verdict);
  return panel;
}
