/** Wire types mirroring the read-only stepgate API (schema_version 1). */

export interface CheckSummary {
  passed: number;
  total: number;
}

export interface StepView {
  name: string;
  kind: string;
  state: string; // NotStarted | Running | Passed | Failed | Stale
  latest_run_id: string | null;
  stale: boolean;
  check_summary: CheckSummary;
}

export interface StepsResponse {
  schema_version: number;
  steps: StepView[];
}

export interface MetricDef {
  name: string;
  direction: "HigherIsBetter" | "LowerIsBetter";
  stage: "Train" | "Validation" | "Both";
}

export interface ProjectResponse {
  schema_version: number;
  name: string;
  step_order: string[];
  metric_registry: MetricDef[];
}

export interface CheckOutcome {
  check: string;
  passed: boolean;
  message: string;
}

export interface RunRecord {
  run_id: string;
  step_name: string;
  started_at: string;
  finished_at: string;
  seed: number;
  config: Record<string, unknown>;
  metrics: Record<string, number>;
  check_outcomes: CheckOutcome[];
  final_state: string;
  forced: boolean;
  fingerprint: { algorithm: string; digest: string; labels: string[] };
}

export interface RunsResponse {
  schema_version: number;
  step: string;
  runs: RunRecord[];
}

export interface CompareResponse {
  schema_version: number;
  metric: string;
  direction: "HigherIsBetter" | "LowerIsBetter";
  pairs: [string, number][];
}
