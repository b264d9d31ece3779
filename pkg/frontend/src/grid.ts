// Estimate entry grid: one row per indicator (source), one column per node
// in engine order (indicators first, targets trailing). Edits are staged in
// the view-model until the DM submits the batch.

import { DIRECTION_LABELS, ProjectViewModel, classifyEstimate } from "./model.js";

export class EstimateGrid {
  constructor(
    private readonly root: HTMLElement,
    private readonly vm: ProjectViewModel,
    private readonly onSubmit: () => void,
  ) {}

  render(): void {
    this.root.innerHTML = "";
    if (!this.vm.project) return;

    const sources = this.vm.indicatorIds();
    const columns = this.vm.nodeOrder();
    const targets = new Set(this.vm.targetIds());

    const table = document.createElement("table");
    table.className = "estimate-grid";

    const head = table.createTHead().insertRow();
    head.appendChild(document.createElement("th")).textContent = "from \\ to";
    for (const column of columns) {
      const th = document.createElement("th");
      th.textContent = column;
      if (targets.has(column)) th.classList.add("target-column");
      head.appendChild(th);
    }

    const body = table.createTBody();
    for (const source of sources) {
      const row = body.insertRow();
      const label = document.createElement("th");
      label.textContent = source;
      row.appendChild(label);
      for (const sink of columns) {
        row.appendChild(this.renderCell(source, sink));
      }
    }
    this.root.appendChild(table);

    const footer = document.createElement("div");
    footer.className = "grid-footer";
    const counter = document.createElement("span");
    counter.className = "staged-count";
    counter.textContent = this.vm.dirty ? `${this.vm.stagedCount} staged edit(s)` : "no staged edits";
    const submit = document.createElement("button");
    submit.className = "submit-estimates";
    submit.textContent = "Submit estimates";
    submit.disabled = !this.vm.dirty;
    submit.addEventListener("click", () => this.onSubmit());
    footer.append(counter, submit);
    this.root.appendChild(footer);
  }

  private renderCell(source: string, sink: string): HTMLTableCellElement {
    const td = document.createElement("td");
    td.dataset.source = source;
    td.dataset.sink = sink;
    if (source === sink) {
      td.className = "self-cell";
      td.textContent = "—";
      return td;
    }
    const cell = this.vm.cell(source, sink);
    if (!cell.editable) {
      td.className = "multi-expert-cell";
      td.textContent = `${cell.estimateCount} estimates`;
      td.title = "aggregated from several experts; edit via the API";
      return td;
    }

    const input = document.createElement("input");
    input.type = "text";
    input.className = "estimate-input";
    const shown = cell.stagedValue ?? cell.serverValue;
    input.value = shown === null ? "" : String(shown);

    const badge = document.createElement("span");
    badge.className = "direction-badge";
    const error = document.createElement("span");
    error.className = "cell-error";

    if (shown !== null) this.applyBadge(badge, shown);
    if (cell.stagedValue !== null) td.classList.add("staged");

    input.addEventListener("change", () => {
      const raw = input.value.trim();
      if (raw === "") {
        this.vm.unstage(source, sink);
        td.classList.remove("staged", "invalid");
        error.textContent = "";
        badge.textContent = "";
        this.refreshFooter();
        return;
      }
      const value = Number(raw);
      const result = this.vm.stage(source, sink, value);
      if (!result.ok) {
        // inline rejection: nothing staged, the cell keeps its error marker
        td.classList.add("invalid");
        td.classList.remove("staged");
        error.textContent = result.error;
        badge.textContent = "";
      } else {
        td.classList.remove("invalid");
        td.classList.add("staged");
        error.textContent = "";
        this.applyBadge(badge, value);
      }
      this.refreshFooter();
    });

    td.append(input, badge, error);
    return td;
  }

  private applyBadge(badge: HTMLElement, value: number): void {
    const direction = classifyEstimate(value);
    badge.textContent = DIRECTION_LABELS[direction];
    badge.dataset.direction = direction;
  }

  private refreshFooter(): void {
    const counter = this.root.querySelector<HTMLElement>(".staged-count");
    const submit = this.root.querySelector<HTMLButtonElement>(".submit-estimates");
    if (counter) {
      counter.textContent = this.vm.dirty
        ? `${this.vm.stagedCount} staged edit(s)`
        : "no staged edits";
    }
    if (submit) submit.disabled = !this.vm.dirty;
  }
}
