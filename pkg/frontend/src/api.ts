/** GET-only API client; the dashboard never mutates the store. */

import type { CompareResponse, ProjectResponse, RunsResponse, StepsResponse } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(private base = "") {}

  private async getJson<T>(path: string, signal?: AbortSignal): Promise<T> {
    const response = await fetch(this.base + path, { method: "GET", signal });
    if (!response.ok) {
      let message = `${response.status}`;
      try {
        const body = (await response.json()) as { error?: string };
        if (body.error) message = body.error;
      } catch {
        /* non-JSON error body; keep the status code */
      }
      throw new ApiError(response.status, message);
    }
    return (await response.json()) as T;
  }

  project(signal?: AbortSignal): Promise<ProjectResponse> {
    return this.getJson("/api/project", signal);
  }

  steps(signal?: AbortSignal): Promise<StepsResponse> {
    return this.getJson("/api/steps", signal);
  }

  runs(stepName: string, signal?: AbortSignal): Promise<RunsResponse> {
    return this.getJson(`/api/steps/${encodeURIComponent(stepName)}/runs`, signal);
  }

  compare(metric: string, runIds: string[], signal?: AbortSignal): Promise<CompareResponse> {
    const params = new URLSearchParams({ metric, runs: runIds.join(",") });
    return this.getJson(`/api/compare?${params.toString()}`, signal);
  }
}
