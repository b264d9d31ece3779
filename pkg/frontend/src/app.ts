// Workbench wiring: composes the grid, rating table and what-if panel over
// one ApiClient, and owns the cross-cutting flows (revision discipline,
// conflict reloads, error banner, dirty-edit guard).

import { ApiError, type ApiClient } from "./api.js";
import { EstimateGrid } from "./grid.js";
import { ProjectViewModel, WhatIfPanelState } from "./model.js";
import { RatingTable } from "./ratings.js";
import { WhatIfPanel } from "./whatif.js";

export interface WorkbenchElements {
  banner: HTMLElement;
  targetSelect: HTMLSelectElement;
  grid: HTMLElement;
  rating: HTMLElement;
  whatif: HTMLElement;
}

export interface Prompter {
  /** Reload-on-conflict prompt; true means reload (dropping staged edits). */
  confirmReload(message: string): boolean;
}

export class Workbench {
  readonly vm = new ProjectViewModel();
  readonly whatIfState = new WhatIfPanelState();
  private readonly grid: EstimateGrid;
  private readonly ratingTable: RatingTable;
  private readonly whatIfPanel: WhatIfPanel;

  constructor(
    private readonly api: ApiClient,
    private readonly el: WorkbenchElements,
    private readonly prompter: Prompter = {
      confirmReload: (message) => window.confirm(message),
    },
  ) {
    this.grid = new EstimateGrid(el.grid, this.vm, () => {
      void this.submitEstimates();
    });
    this.ratingTable = new RatingTable(el.rating);
    this.whatIfPanel = new WhatIfPanel(el.whatif, this.whatIfState, () => {
      void this.runWhatIf();
    });
    el.targetSelect.addEventListener("change", () => {
      this.vm.selectedTargetId = el.targetSelect.value || null;
      void this.refreshRating();
    });
  }

  /** True when leaving the page would lose staged edits. */
  hasUnsavedEdits(): boolean {
    return this.vm.dirty;
  }

  async loadProject(projectId: string): Promise<void> {
    this.clearBanner();
    try {
      const payload = await this.api.getProject(projectId);
      this.vm.load(payload);
      this.whatIfState.reset();
      this.renderAll();
      await this.refreshRating();
    } catch (error) {
      this.showError(error);
    }
  }

  async submitEstimates(): Promise<void> {
    const project = this.vm.project;
    if (!project || !this.vm.dirty) return;
    this.clearBanner();
    try {
      const updated = await this.api.postEstimates(project.id, this.vm.revision, this.vm.batch());
      this.vm.load(updated);
      this.renderAll();
      await this.refreshRating(); // read-after-write: ratings follow the edit
    } catch (error) {
      if (error instanceof ApiError && error.code === "CONFLICT") {
        const reload = this.prompter.confirmReload(
          `${error.message}. Reload the project? Staged edits are kept if you cancel.`,
        );
        if (reload) await this.loadProject(project.id);
        // cancel: staged values stay; the DM can retry after reviewing
        return;
      }
      this.showError(error);
    }
  }

  async refreshRating(): Promise<void> {
    const project = this.vm.project;
    const targetId = this.vm.selectedTargetId;
    if (!project || targetId === null) {
      this.ratingTable.renderEmpty("no target selected");
      return;
    }
    try {
      const rating = await this.api.getRating(project.id, targetId);
      this.ratingTable.render(rating);
    } catch (error) {
      if (error instanceof ApiError && error.code === "NOT_FOUND") {
        this.ratingTable.renderEmpty(`no rating for target ${targetId}`);
        return;
      }
      this.showError(error);
    }
  }

  async runWhatIf(): Promise<void> {
    const project = this.vm.project;
    if (!project) return;
    this.clearBanner();
    const scenario = this.whatIfState.scenario();
    try {
      const response = await this.api.postWhatIf(project.id, scenario);
      this.whatIfState.record(scenario, response.deltas);
      this.whatIfPanel.renderOutcome(this.vm.targetIds());
      this.whatIfPanel.renderHistory();
    } catch (error) {
      this.showError(error);
    }
  }

  renderAll(): void {
    this.grid.render();
    this.whatIfPanel.render(this.vm.indicatorIds(), this.vm.targetIds());
    this.renderTargetSelect();
  }

  private renderTargetSelect(): void {
    const select = this.el.targetSelect;
    select.innerHTML = "";
    for (const targetId of this.vm.targetIds()) {
      const option = document.createElement("option");
      option.value = targetId;
      option.textContent = targetId;
      option.selected = targetId === this.vm.selectedTargetId;
      select.appendChild(option);
    }
  }

  showError(error: unknown): void {
    const banner = this.el.banner;
    banner.hidden = false;
    if (error instanceof ApiError) {
      banner.textContent = `${error.code}: ${error.message}`;
    } else {
      banner.textContent = String(error);
    }
  }

  clearBanner(): void {
    this.el.banner.hidden = true;
    this.el.banner.textContent = "";
  }
}
