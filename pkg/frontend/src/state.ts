/** Dashboard view model: what is shown and what the user selected. */

import type { ProjectResponse, RunRecord, StepView } from "./types.js";

export interface ViewModel {
  project: ProjectResponse | null;
  steps: StepView[];
  runs: RunRecord[]; // runs of the selected step, newest first
  selectedStep: string | null;
  selectedRuns: Set<string>;
  compareMetric: string;
  error: string | null;
}

export function createModel(): ViewModel {
  return {
    project: null,
    steps: [],
    runs: [],
    selectedStep: null,
    selectedRuns: new Set(),
    compareMetric: "validation/accuracy",
    error: null,
  };
}

/** Metric keys a run table can show, in registry order (stage-expanded). */
export function metricColumns(project: ProjectResponse | null, runs: RunRecord[]): string[] {
  if (project === null) return [];
  const present = new Set<string>();
  for (const run of runs) {
    for (const key of Object.keys(run.metrics)) present.add(key);
  }
  const columns: string[] = [];
  for (const def of project.metric_registry) {
    for (const stage of def.stage === "Both" ? ["train", "validation"] : [def.stage.toLowerCase()]) {
      const key = `${stage}/${def.name}`;
      if (present.has(key)) columns.push(key);
    }
  }
  return columns;
}

/** Keep selections that still exist after a refresh; drop the rest. */
export function reconcileSelection(model: ViewModel): void {
  if (model.selectedStep !== null && !model.steps.some((s) => s.name === model.selectedStep)) {
    model.selectedStep = null;
    model.runs = [];
    model.selectedRuns.clear();
    return;
  }
  const known = new Set(model.runs.map((r) => r.run_id));
  for (const id of [...model.selectedRuns]) {
    if (!known.has(id)) model.selectedRuns.delete(id);
  }
}
