/** GET-only API client; the dashboard never mutates the store. */
export class ApiError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
export class ApiClient {
    constructor(base = "") {
        this.base = base;
    }
    async getJson(path, signal) {
        const response = await fetch(this.base + path, { method: "GET", signal });
        if (!response.ok) {
            let message = `${response.status}`;
            try {
                const body = (await response.json());
                if (body.error)
                    message = body.error;
            }
            catch {
                /* non-JSON error body; keep the status code */
            }
            throw new ApiError(response.status, message);
        }
        return (await response.json());
    }
    project(signal) {
        return this.getJson("/api/project", signal);
    }
    steps(signal) {
        return this.getJson("/api/steps", signal);
    }
    runs(stepName, signal) {
        return this.getJson(`/api/steps/${encodeURIComponent(stepName)}/runs`, signal);
    }
    compare(metric, runIds, signal) {
        const params = new URLSearchParams({ metric, runs: runIds.join(",") });
        return this.getJson(`/api/compare?${params.toString()}`, signal);
    }
}
