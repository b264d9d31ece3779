// Rating table: renders the server's entries in the order they arrive.
// Sorting is the engine's job; the client never re-orders rows.

import type { RatingPayload } from "./api.js";

export class RatingTable {
  constructor(private readonly root: HTMLElement) {}

  renderEmpty(message: string): void {
    this.root.innerHTML = "";
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = message;
    this.root.appendChild(empty);
  }

  render(rating: RatingPayload): void {
    this.root.innerHTML = "";
    const caption = document.createElement("p");
    caption.className = "rating-caption";
    caption.textContent = `rating for ${rating.target_id}`;
    this.root.appendChild(caption);

    const table = document.createElement("table");
    table.className = "rating-table";
    const head = table.createTHead().insertRow();
    for (const column of ["rank", "indicator", "|total impact|", "relevance", "criticality"]) {
      head.appendChild(document.createElement("th")).textContent = column;
    }

    const body = table.createTBody();
    for (const entry of rating.entries) {
      const row = body.insertRow();
      row.dataset.indicatorId = entry.indicator_id;

      row.insertCell().textContent = String(entry.rank);
      row.insertCell().textContent = entry.indicator_id;

      const total = row.insertCell();
      total.className = "total-impact";
      total.dataset.value = String(entry.total_impact);
      total.textContent = entry.total_impact.toFixed(4);

      const relevance = row.insertCell();
      relevance.dataset.value = String(entry.relevance);
      relevance.textContent = entry.relevance.toFixed(2);

      const criticality = row.insertCell();
      criticality.textContent = entry.criticality;
      criticality.className = `criticality crit-${entry.criticality}`;
    }
    this.root.appendChild(table);
  }
}
