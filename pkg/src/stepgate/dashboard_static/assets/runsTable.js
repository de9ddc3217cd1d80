/** Panel B: runs of the selected step, metrics as columns, rows selectable. */
import { metricColumns } from "./state.js";
export function renderRunsTable(container, model, onToggleRun) {
    container.replaceChildren();
    const heading = document.createElement("h2");
    heading.textContent = model.selectedStep === null ? "Runs" : `Runs of ${model.selectedStep}`;
    container.appendChild(heading);
    if (model.selectedStep === null) {
        const hint = document.createElement("p");
        hint.className = "empty-state";
        hint.textContent = "Select a step to inspect its runs.";
        container.appendChild(hint);
        return;
    }
    if (model.runs.length === 0) {
        const empty = document.createElement("p");
        empty.className = "empty-state";
        empty.textContent = "This step has no recorded runs yet.";
        container.appendChild(empty);
        return;
    }
    const columns = metricColumns(model.project, model.runs);
    const table = document.createElement("table");
    table.className = "runs-table";
    const head = table.createTHead().insertRow();
    for (const title of ["", "run", "started", "seed", ...columns, "checks", "state"]) {
        const th = document.createElement("th");
        th.textContent = title;
        head.appendChild(th);
    }
    const body = table.createTBody();
    for (const run of model.runs) {
        const row = body.insertRow();
        row.dataset.runId = run.run_id;
        const pick = row.insertCell();
        const checkbox = document.createElement("input");
        checkbox.type = "checkbox";
        checkbox.checked = model.selectedRuns.has(run.run_id);
        checkbox.addEventListener("change", () => onToggleRun(run.run_id, checkbox.checked));
        pick.appendChild(checkbox);
        row.insertCell().textContent = run.run_id;
        row.insertCell().textContent = run.started_at;
        row.insertCell().textContent = String(run.seed);
        for (const key of columns) {
            const cell = row.insertCell();
            cell.className = "metric-cell";
            // a missing metric renders blank, never 0
            cell.textContent = key in run.metrics ? String(run.metrics[key]) : "";
        }
        const passed = run.check_outcomes.filter((o) => o.passed).length;
        const checksCell = row.insertCell();
        checksCell.textContent = `${passed}/${run.check_outcomes.length}`;
        checksCell.title = run.check_outcomes.map((o) => `${o.passed ? "ok" : "FAIL"} ${o.message}`).join("\n");
        const state = row.insertCell();
        state.textContent = run.final_state + (run.forced ? " (forced)" : "");
        state.className = run.final_state === "Passed" ? "state-passed" : "state-failed";
    }
    container.appendChild(table);
}
