// Thin fetch client for the dagcraft HTTP API. Every number shown in
// the UI comes through here; the client never recomputes statistics.

import type {
  CorrelationsJson,
  DiffJson,
  DotView,
  ErrorJson,
  GraphJson,
  IterationRowJson,
  ProjectDetailJson,
  ProjectSummaryJson,
  SnapshotJson,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly payload: ErrorJson;

  constructor(status: number, payload: ErrorJson) {
    super(payload.message || `HTTP ${status}`);
    this.status = status;
    this.payload = payload;
  }

  /** Stable machine-readable kind, e.g. "cycle" or "singular-design". */
  get kind(): string {
    return this.payload.error;
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let payload: ErrorJson;
  try {
    payload = (await resp.json()) as ErrorJson;
  } catch {
    payload = { error: "http", message: `HTTP ${resp.status}` };
  }
  return new ApiError(resp.status, payload);
}

export class ApiClient {
  readonly baseUrl: string;

  constructor(baseUrl: string = "") {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await fetch(this.baseUrl + path, init);
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  health(): Promise<{ status: string; version: string }> {
    return this.request("GET", "/health");
  }

  listProjects(): Promise<ProjectSummaryJson[]> {
    return this.request("GET", "/projects");
  }

  createToyProject(
    n: number,
    seed: number,
    settings: Partial<ProjectDetailJson["settings"]> = {},
  ): Promise<{ id: string }> {
    return this.request("POST", "/projects", {
      dataset: { toy: { n, seed } },
      settings,
    });
  }

  createCsvProject(
    csv: string,
    settings: Partial<ProjectDetailJson["settings"]> = {},
  ): Promise<{ id: string }> {
    return this.request("POST", "/projects", { dataset: { csv }, settings });
  }

  getProject(id: string): Promise<ProjectDetailJson> {
    return this.request("GET", `/projects/${id}`);
  }

  putGraph(id: string, graph: GraphJson): Promise<{ graph: GraphJson }> {
    return this.request("PUT", `/projects/${id}/graph`, graph);
  }

  runIteration(id: string, note: string = ""): Promise<SnapshotJson> {
    return this.request("POST", `/projects/${id}/iterations`, { note });
  }

  listIterations(id: string): Promise<IterationRowJson[]> {
    return this.request("GET", `/projects/${id}/iterations`);
  }

  getIteration(id: string, k: number): Promise<SnapshotJson> {
    return this.request("GET", `/projects/${id}/iterations/${k}`);
  }

  async getDot(id: string, k: number, view: DotView): Promise<string> {
    const resp = await fetch(
      `${this.baseUrl}/projects/${id}/iterations/${k}/dot?view=${view}`,
    );
    if (!resp.ok) throw await parseError(resp);
    return resp.text();
  }

  getCorrelations(
    id: string,
    reps: number = 999,
    method: "bh" | "by" = "bh",
  ): Promise<CorrelationsJson> {
    return this.request(
      "GET",
      `/projects/${id}/correlations?reps=${reps}&method=${method}`,
    );
  }

  getDiff(id: string, from: number, to: number): Promise<DiffJson> {
    return this.request("GET", `/projects/${id}/diff?from=${from}&to=${to}`);
  }
}
