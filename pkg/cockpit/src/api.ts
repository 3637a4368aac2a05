/** Thin client for the run service; fetch is injectable for tests. */

import type { Preset, RunRecord, RunSummary, SubmitRequest } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`service answered ${status}: ${JSON.stringify(detail)}`);
  }
}

export class CockpitApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      throw new ApiError(response.status, body?.detail ?? body);
    }
    return body as T;
  }

  listPresets(): Promise<Preset[]> {
    return this.request<Preset[]>("/api/presets");
  }

  async submitRun(submission: SubmitRequest): Promise<string> {
    const body = await this.request<{ id: string }>("/api/runs", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(submission),
    });
    return body.id;
  }

  getRun(id: string): Promise<RunRecord> {
    return this.request<RunRecord>(`/api/runs/${id}`);
  }

  listRuns(): Promise<RunSummary[]> {
    return this.request<RunSummary[]>("/api/runs");
  }

  /** Results are served as the same delimited file the CLI writes. */
  async fetchResultsCsv(id: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/runs/${id}/results.csv`);
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return response.text();
  }

  resultsCsvUrl(id: string): string {
    return `${this.baseUrl}/api/runs/${id}/results.csv`;
  }
}
