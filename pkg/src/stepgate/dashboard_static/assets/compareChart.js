/** Panel C: best-first bar chart of one metric across the selected runs. */
const BAR_HEIGHT = 26;
const BAR_GAP = 8;
const LABEL_WIDTH = 190;
const CHART_WIDTH = 640;
export function renderCompareChart(container, model, comparison, compareError, onMetricChange) {
    container.replaceChildren();
    const heading = document.createElement("h2");
    heading.textContent = "Compare runs";
    container.appendChild(heading);
    const picker = document.createElement("select");
    picker.className = "metric-picker";
    for (const key of availableMetricKeys(model)) {
        const option = document.createElement("option");
        option.value = key;
        option.textContent = key;
        option.selected = key === model.compareMetric;
        picker.appendChild(option);
    }
    picker.addEventListener("change", () => onMetricChange(picker.value));
    container.appendChild(picker);
    if (compareError !== null) {
        const error = document.createElement("p");
        error.className = "inline-error";
        error.textContent = compareError;
        container.appendChild(error);
        return;
    }
    if (model.selectedRuns.size === 0 || comparison === null) {
        const hint = document.createElement("p");
        hint.className = "empty-state";
        hint.textContent = "Select one or more runs in the table to compare them.";
        container.appendChild(hint);
        return;
    }
    const axis = document.createElement("p");
    axis.className = "axis-label";
    const better = comparison.direction === "HigherIsBetter" ? "higher is better" : "lower is better";
    axis.textContent = `${comparison.metric} (${better}, best first)`;
    container.appendChild(axis);
    container.appendChild(buildBars(comparison));
}
function availableMetricKeys(model) {
    if (model.project === null)
        return [model.compareMetric];
    const keys = [];
    for (const def of model.project.metric_registry) {
        for (const stage of def.stage === "Both" ? ["train", "validation"] : [def.stage.toLowerCase()]) {
            keys.push(`${stage}/${def.name}`);
        }
    }
    return keys;
}
function buildBars(comparison) {
    const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    const n = comparison.pairs.length;
    const height = n * (BAR_HEIGHT + BAR_GAP) + BAR_GAP;
    svg.setAttribute("viewBox", `0 0 ${CHART_WIDTH} ${height}`);
    svg.setAttribute("width", String(CHART_WIDTH));
    svg.setAttribute("height", String(height));
    svg.classList.add("compare-chart");
    const maxAbs = Math.max(1e-12, ...comparison.pairs.map(([, v]) => Math.abs(v)));
    const usable = CHART_WIDTH - LABEL_WIDTH - 90;
    comparison.pairs.forEach(([runId, value], index) => {
        const y = BAR_GAP + index * (BAR_HEIGHT + BAR_GAP);
        const label = text(runId, 0, y + BAR_HEIGHT * 0.7);
        label.classList.add("bar-label");
        svg.appendChild(label);
        const bar = document.createElementNS("http://www.w3.org/2000/svg", "rect");
        bar.setAttribute("x", String(LABEL_WIDTH));
        bar.setAttribute("y", String(y));
        bar.setAttribute("width", String(Math.max(1, (Math.abs(value) / maxAbs) * usable)));
        bar.setAttribute("height", String(BAR_HEIGHT));
        bar.classList.add("bar", index === 0 ? "bar-best" : "bar-rest");
        bar.dataset.runId = runId;
        svg.appendChild(bar);
        // verbatim API value, no reformatting
        const valueLabel = text(String(value), LABEL_WIDTH + Math.max(1, (Math.abs(value) / maxAbs) * usable) + 6, y + BAR_HEIGHT * 0.7);
        valueLabel.classList.add("bar-value");
        svg.appendChild(valueLabel);
    });
    return svg;
}
function text(content, x, y) {
    const node = document.createElementNS("http://www.w3.org/2000/svg", "text");
    node.textContent = content;
    node.setAttribute("x", String(x));
    node.setAttribute("y", String(y));
    return node;
}
