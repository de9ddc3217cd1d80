/** Fixture responses mirroring the wire format of a real run store. */

import type {
  CompareResponse,
  ProjectResponse,
  RunRecord,
  RunsResponse,
  StepsResponse,
} from "../src/types.js";

export const PROJECT: ProjectResponse = {
  schema_version: 1,
  name: "demo",
  step_order: [
    "analyze_data",
    "check_loss_on_init",
    "overfit_one_batch",
    "regularize",
    "transfer_learning",
  ],
  metric_registry: [
    { name: "cross_entropy", direction: "LowerIsBetter", stage: "Both" },
    { name: "accuracy", direction: "HigherIsBetter", stage: "Both" },
    { name: "generalization_gap", direction: "LowerIsBetter", stage: "Validation" },
    { name: "weight_norm", direction: "LowerIsBetter", stage: "Train" },
    { name: "n_samples", direction: "HigherIsBetter", stage: "Train" },
    { name: "min_class_proportion", direction: "HigherIsBetter", stage: "Train" },
    { name: "has_non_finite", direction: "LowerIsBetter", stage: "Train" },
  ],
};

export const MIXED_STEPS: StepsResponse = {
  schema_version: 1,
  steps: [
    {
      name: "analyze_data",
      kind: "AnalyzeData",
      state: "Passed",
      latest_run_id: "20260810T100000Z0001",
      stale: false,
      check_summary: { passed: 2, total: 2 },
    },
    {
      name: "check_loss_on_init",
      kind: "CheckLossOnInit",
      state: "Failed",
      latest_run_id: "20260810T100001Z0002",
      stale: false,
      check_summary: { passed: 0, total: 1 },
    },
    {
      name: "overfit_one_batch",
      kind: "OverfitOneBatch",
      state: "Stale",
      latest_run_id: "20260810T100002Z0003",
      stale: true,
      check_summary: { passed: 1, total: 1 },
    },
    {
      name: "regularize",
      kind: "Regularize",
      state: "NotStarted",
      latest_run_id: null,
      stale: false,
      check_summary: { passed: 0, total: 0 },
    },
    {
      name: "transfer_learning",
      kind: "TransferLearning",
      state: "NotStarted",
      latest_run_id: null,
      stale: false,
      check_summary: { passed: 0, total: 0 },
    },
  ],
};

function run(id: string, metrics: Record<string, number>, passed: boolean): RunRecord {
  return {
    run_id: id,
    step_name: "overfit_one_batch",
    started_at: "2026-08-10T10:00:00.000000Z",
    finished_at: "2026-08-10T10:00:01.000000Z",
    seed: 0,
    config: { lr: 0.5, max_iters: 2000 },
    metrics,
    check_outcomes: [
      {
        check: "LessThan(train/cross_entropy, 0.01)",
        passed,
        message: passed
          ? "train/cross_entropy=0.0002 < 0.01"
          : "train/cross_entropy=0.69 is not < 0.01",
      },
    ],
    final_state: passed ? "Passed" : "Failed",
    forced: false,
    fingerprint: { algorithm: "sha256", digest: "a".repeat(64), labels: ["notes"] },
  };
}

export const TWO_RUNS: RunsResponse = {
  schema_version: 1,
  step: "overfit_one_batch",
  runs: [
    run("20260810T100002Z0003", {
      "train/cross_entropy": 0.000200157264427862,
      "train/accuracy": 1.0,
      "validation/accuracy": 0.8866666666666667,
      "validation/cross_entropy": 0.8443570036543,
    }, true),
    // older run missing validation/accuracy on purpose
    run("20260810T100001Z0002", {
      "train/cross_entropy": 0.6931471805599453,
      "train/accuracy": 0.5,
      "validation/cross_entropy": 1.21,
    }, false),
  ],
};

export const COMPARE_ACC: CompareResponse = {
  schema_version: 1,
  metric: "validation/accuracy",
  direction: "HigherIsBetter",
  pairs: [
    ["20260810T100002Z0003", 0.9],
    ["20260810T100001Z0002", 0.8],
  ],
};

export const COMPARE_CE: CompareResponse = {
  schema_version: 1,
  metric: "validation/cross_entropy",
  direction: "LowerIsBetter",
  pairs: [
    ["20260810T100001Z0002", 0.3],
    ["20260810T100002Z0003", 0.5],
  ],
};

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}
