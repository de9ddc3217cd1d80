/** Wires the three panels to the API with polling and abortable refreshes. */

import { ApiClient, ApiError } from "./api.js";
import { renderCompareChart } from "./compareChart.js";
import { renderRunsTable } from "./runsTable.js";
import { createModel, reconcileSelection, type ViewModel } from "./state.js";
import { fillFailureMessages, renderStepList } from "./stepList.js";
import type { CompareResponse } from "./types.js";

export interface Panels {
  banner: HTMLElement;
  project: HTMLElement;
  steps: HTMLElement;
  runs: HTMLElement;
  compare: HTMLElement;
}

export const POLL_INTERVAL_MS = 2000;

export class App {
  readonly model: ViewModel = createModel();
  private comparison: CompareResponse | null = null;
  private compareError: string | null = null;
  private inflight: AbortController | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(private api: ApiClient, private panels: Panels) {}

  start(intervalMs: number = POLL_INTERVAL_MS): void {
    void this.refresh();
    this.timer = setInterval(() => void this.refresh(), intervalMs);
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.inflight?.abort();
  }

  /** One polling cycle; a new cycle supersedes any still-running one. */
  async refresh(): Promise<void> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const signal = controller.signal;
    try {
      this.model.project = await this.api.project(signal);
      this.model.steps = (await this.api.steps(signal)).steps;
      if (this.model.selectedStep !== null) {
        this.model.runs = (await this.api.runs(this.model.selectedStep, signal)).runs;
      }
      reconcileSelection(this.model);
      await this.refreshComparison(signal);
      this.model.error = null;
    } catch (error) {
      if (signal.aborted) return; // superseded by a newer cycle
      this.model.error = error instanceof Error ? error.message : String(error);
    }
    if (!signal.aborted) this.render();
  }

  private async refreshComparison(signal: AbortSignal): Promise<void> {
    this.comparison = null;
    this.compareError = null;
    if (this.model.selectedRuns.size === 0 || !this.model.compareMetric) return;
    try {
      this.comparison = await this.api.compare(
        this.model.compareMetric,
        [...this.model.selectedRuns].sort(),
        signal,
      );
    } catch (error) {
      if (error instanceof ApiError) {
        this.compareError = error.message; // e.g. unknown metric, surfaced inline
      } else {
        throw error;
      }
    }
  }

  render(): void {
    const { banner, project, steps, runs, compare } = this.panels;
    if (this.model.error !== null) {
      banner.textContent = `cannot reach the run store API: ${this.model.error}`;
      banner.classList.add("visible");
    } else {
      banner.textContent = "";
      banner.classList.remove("visible");
    }
    project.textContent = this.model.project === null
      ? ""
      : `project ${this.model.project.name} — ${this.model.steps.length} steps`;
    renderStepList(steps, this.model, (name) => void this.selectStep(name));
    renderRunsTable(runs, this.model, (id, on) => void this.toggleRun(id, on));
    fillFailureMessages(steps, this.model);
    renderCompareChart(compare, this.model, this.comparison, this.compareError,
                       (metric) => void this.setMetric(metric));
  }

  async selectStep(name: string): Promise<void> {
    if (this.model.selectedStep !== name) {
      this.model.selectedStep = name;
      this.model.selectedRuns.clear();
    }
    await this.refresh();
  }

  async toggleRun(runId: string, selected: boolean): Promise<void> {
    if (selected) this.model.selectedRuns.add(runId);
    else this.model.selectedRuns.delete(runId);
    await this.refresh();
  }

  async setMetric(metric: string): Promise<void> {
    this.model.compareMetric = metric;
    await this.refresh();
  }
}
