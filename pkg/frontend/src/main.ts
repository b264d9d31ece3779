// Browser bootstrap: wire the workbench to the page and the live API.

import { HttpApiClient } from "./api.js";
import { Workbench } from "./app.js";

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

export function bootstrap(): Workbench {
  const workbench = new Workbench(new HttpApiClient(""), {
    banner: element("banner"),
    targetSelect: element<HTMLSelectElement>("target-select"),
    grid: element("estimate-grid"),
    rating: element("rating-table"),
    whatif: element("whatif-panel"),
  });

  const idInput = element<HTMLInputElement>("project-id");
  element<HTMLButtonElement>("load-project").addEventListener("click", () => {
    const projectId = idInput.value.trim();
    if (projectId) void workbench.loadProject(projectId);
  });

  // staged-edit safety: leaving the page with dirty edits prompts
  window.addEventListener("beforeunload", (event) => {
    if (workbench.hasUnsavedEdits()) {
      event.preventDefault();
      event.returnValue = "";
    }
  });

  return workbench;
}

if (typeof document !== "undefined" && document.getElementById("estimate-grid")) {
  bootstrap();
}
