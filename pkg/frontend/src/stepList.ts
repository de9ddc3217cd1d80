/** Panel A: the step sequence with status badges and failure details. */

import type { ViewModel } from "./state.js";
import type { StepView } from "./types.js";

const BADGE_CLASS: Record<string, string> = {
  NotStarted: "badge-notstarted",
  Running: "badge-running",
  Passed: "badge-passed",
  Failed: "badge-failed",
  Stale: "badge-stale",
};

export function badgeClassFor(state: string): string {
  return BADGE_CLASS[state] ?? "badge-unknown";
}

export function renderStepList(
  container: HTMLElement,
  model: ViewModel,
  onSelect: (stepName: string) => void,
): void {
  container.replaceChildren();
  const heading = document.createElement("h2");
  heading.textContent = "Steps";
  container.appendChild(heading);

  if (model.steps.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No steps registered in this project yet.";
    container.appendChild(empty);
    return;
  }

  const list = document.createElement("ol");
  list.className = "step-list";
  for (const step of model.steps) {
    list.appendChild(stepRow(step, model, onSelect));
  }
  container.appendChild(list);
}

function stepRow(step: StepView, model: ViewModel, onSelect: (n: string) => void): HTMLLIElement {
  const row = document.createElement("li");
  row.className = "step-row" + (model.selectedStep === step.name ? " selected" : "");
  row.dataset.step = step.name;

  const button = document.createElement("button");
  button.type = "button";
  button.className = "step-name";
  button.textContent = step.name;
  button.addEventListener("click", () => onSelect(step.name));
  row.appendChild(button);

  const kind = document.createElement("span");
  kind.className = "step-kind";
  kind.textContent = step.kind;
  row.appendChild(kind);

  const badge = document.createElement("span");
  badge.className = `badge ${badgeClassFor(step.state)}`;
  badge.textContent = step.state;
  row.appendChild(badge);

  if (step.check_summary.total > 0) {
    const checks = document.createElement("span");
    checks.className = "check-summary";
    checks.textContent = `${step.check_summary.passed}/${step.check_summary.total} checks`;
    row.appendChild(checks);
  }

  if (step.stale) {
    const hint = document.createElement("span");
    hint.className = "stale-hint";
    hint.textContent = "sources changed — re-run needed";
    row.appendChild(hint);
  }

  if (step.state === "Failed") {
    const details = document.createElement("details");
    details.className = "failure-details";
    const summary = document.createElement("summary");
    summary.textContent = "why it failed";
    details.appendChild(summary);
    const body = document.createElement("p");
    body.className = "failure-message";
    body.textContent = "Select the step to inspect its failing checks in the runs table.";
    details.appendChild(body);
    row.appendChild(details);
  }
  return row;
}

/** Fill failure details with the latest run's failing messages once runs are loaded. */
export function fillFailureMessages(container: HTMLElement, model: ViewModel): void {
  if (model.selectedStep === null || model.runs.length === 0) return;
  const row = container.querySelector<HTMLElement>(`[data-step="${model.selectedStep}"]`);
  const body = row?.querySelector<HTMLElement>(".failure-message");
  if (!body) return;
  const latest = model.runs[0];
  if (!latest) return;
  const failing = latest.check_outcomes.filter((o) => !o.passed);
  if (failing.length > 0) {
    body.textContent = failing.map((o) => `${o.check}: ${o.message}`).join("\n");
  }
}
