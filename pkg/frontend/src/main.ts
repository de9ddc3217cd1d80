import { ApiClient } from "./api.js";
import { App } from "./app.js";

function mount(): void {
  const byId = (id: string): HTMLElement => {
    const node = document.getElementById(id);
    if (node === null) throw new Error(`missing #${id} in index.html`);
    return node;
  };
  const app = new App(new ApiClient(), {
    banner: byId("banner"),
    project: byId("project-info"),
    steps: byId("steps-panel"),
    runs: byId("runs-panel"),
    compare: byId("compare-panel"),
  });
  app.start();
}

document.addEventListener("DOMContentLoaded", mount);
