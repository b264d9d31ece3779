// What-if panel: shock sliders per indicator, predicted target deltas from
// the server, and a session-local history so the DM can compare interventions.

import { SLIDER_MAX, SLIDER_MIN, SLIDER_STEP, WhatIfPanelState } from "./model.js";

export class WhatIfPanel {
  constructor(
    private readonly root: HTMLElement,
    private readonly state: WhatIfPanelState,
    private readonly onRun: () => void,
  ) {}

  render(indicatorIds: string[], targetIds: string[]): void {
    this.root.innerHTML = "";

    const sliders = document.createElement("div");
    sliders.className = "whatif-sliders";
    for (const id of indicatorIds) {
      const row = document.createElement("label");
      row.className = "slider-row";
      row.dataset.indicatorId = id;

      const name = document.createElement("span");
      name.className = "slider-name";
      name.textContent = id;

      const input = document.createElement("input");
      input.type = "range";
      input.min = String(SLIDER_MIN);
      input.max = String(SLIDER_MAX);
      input.step = String(SLIDER_STEP);
      input.value = String(this.state.slider(id));

      const value = document.createElement("span");
      value.className = "slider-value";
      value.textContent = this.state.slider(id).toFixed(2);

      input.addEventListener("input", () => {
        const snapped = this.state.setSlider(id, Number(input.value));
        value.textContent = snapped.toFixed(2);
      });

      row.append(name, input, value);
      sliders.appendChild(row);
    }
    this.root.appendChild(sliders);

    const run = document.createElement("button");
    run.className = "run-whatif";
    run.textContent = "Run what-if";
    run.addEventListener("click", () => this.onRun());
    this.root.appendChild(run);

    const outcome = document.createElement("div");
    outcome.className = "whatif-outcome";
    this.root.appendChild(outcome);
    this.renderOutcome(targetIds);

    const history = document.createElement("ol");
    history.className = "whatif-history";
    this.root.appendChild(history);
    this.renderHistory();
  }

  renderOutcome(targetIds: string[]): void {
    const container = this.root.querySelector<HTMLElement>(".whatif-outcome");
    if (!container) return;
    container.innerHTML = "";
    if (!this.state.latest) {
      container.textContent = "no prediction yet";
      return;
    }
    const list = document.createElement("ul");
    for (const targetId of targetIds) {
      const delta = this.state.latest.outcome[targetId] ?? 0;
      const item = document.createElement("li");
      item.className = "target-delta";
      item.dataset.targetId = targetId;
      item.dataset.value = String(delta);
      const sign = delta > 0 ? "+" : delta < 0 ? "−" : "±";
      item.textContent = `${targetId}: ${sign}${Math.abs(delta).toFixed(4)}`;
      list.appendChild(item);
    }
    container.appendChild(list);
  }

  renderHistory(): void {
    const container = this.root.querySelector<HTMLElement>(".whatif-history");
    if (!container) return;
    container.innerHTML = "";
    for (const run of this.state.history) {
      const item = document.createElement("li");
      const shocks = Object.entries(run.scenario)
        .map(([id, v]) => `${id}=${v}`)
        .join(", ");
      const effects = Object.entries(run.outcome)
        .filter(([, v]) => v !== 0)
        .map(([id, v]) => `${id}: ${v.toFixed(3)}`)
        .join(", ");
      item.textContent = `{${shocks || "nothing"}} → {${effects || "no change"}}`;
      container.appendChild(item);
    }
  }
}
