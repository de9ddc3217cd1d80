/** Dashboard view model: what is shown and what the user selected. */
export function createModel() {
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
export function metricColumns(project, runs) {
    if (project === null)
        return [];
    const present = new Set();
    for (const run of runs) {
        for (const key of Object.keys(run.metrics))
            present.add(key);
    }
    const columns = [];
    for (const def of project.metric_registry) {
        for (const stage of def.stage === "Both" ? ["train", "validation"] : [def.stage.toLowerCase()]) {
            const key = `${stage}/${def.name}`;
            if (present.has(key))
                columns.push(key);
        }
    }
    return columns;
}
/** Keep selections that still exist after a refresh; drop the rest. */
export function reconcileSelection(model) {
    if (model.selectedStep !== null && !model.steps.some((s) => s.name === model.selectedStep)) {
        model.selectedStep = null;
        model.runs = [];
        model.selectedRuns.clear();
        return;
    }
    const known = new Set(model.runs.map((r) => r.run_id));
    for (const id of [...model.selectedRuns]) {
        if (!known.has(id))
            model.selectedRuns.delete(id);
    }
}
