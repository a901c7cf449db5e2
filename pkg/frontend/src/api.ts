/**
 * Typed client for the morphspace HTTP API.
 *
 * The fetch implementation is injected so tests can stub the network and
 * assert on exactly which requests a view issues. All error responses are
 * normalized into ApiError carrying the server's {code, message, path} body
 * plus the HTTP status, so views can branch on codes such as
 * "revision-conflict" or "too-large" without string-matching messages.
 */

import type {
  AnalysisResult,
  ArtifactDetail,
  ErrorBody,
  ExploreResult,
  FieldDetail,
  FieldDoc,
  FieldSummary,
  JudgmentRow,
  JudgmentsResult,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly path: string;

  constructor(status: number, body: ErrorBody) {
    super(body.message);
    this.name = "ApiError";
    this.status = status;
    this.code = body.code;
    this.path = body.path;
  }
}

export class WorkbenchClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = "", fetchFn: FetchLike = (...args) => fetch(...args)) {
    // base must not end in a slash; paths below start with one
    this.base = base.replace(/\/+$/, "");
    this.fetchFn = fetchFn;
  }

  async listFields(): Promise<FieldSummary[]> {
    return this.request<FieldSummary[]>("GET", "/api/v1/fields");
  }

  async getField(fieldId: string): Promise<FieldDetail> {
    return this.request<FieldDetail>("GET", `/api/v1/fields/${encodeURIComponent(fieldId)}`);
  }

  async createField(doc: FieldDoc): Promise<{ id: string; revision: number }> {
    return this.request("POST", "/api/v1/fields", doc);
  }

  async updateField(doc: FieldDoc, baseRevision?: number): Promise<{ id: string; revision: number }> {
    const body: Record<string, unknown> = { ...doc };
    if (baseRevision !== undefined) body.base_revision = baseRevision;
    return this.request("PUT", `/api/v1/fields/${encodeURIComponent(doc.id)}`, body);
  }

  async deleteField(fieldId: string): Promise<{ id: string; revision: number; deleted: boolean }> {
    return this.request("DELETE", `/api/v1/fields/${encodeURIComponent(fieldId)}`);
  }

  async getJudgments(fieldId: string): Promise<{ id: string; revision: number; judgments: JudgmentRow[] }> {
    return this.request("GET", `/api/v1/fields/${encodeURIComponent(fieldId)}/judgments`);
  }

  async putJudgments(
    fieldId: string,
    judgments: JudgmentRow[],
    revision?: number,
  ): Promise<JudgmentsResult> {
    const body: Record<string, unknown> = { judgments };
    if (revision !== undefined) body.revision = revision;
    return this.request<JudgmentsResult>(
      "PUT",
      `/api/v1/fields/${encodeURIComponent(fieldId)}/judgments`,
      body,
    );
  }

  async explore(fieldId: string, pins: readonly string[], cca: boolean): Promise<ExploreResult> {
    const query = new URLSearchParams();
    for (const pin of pins) query.append("pin", pin);
    query.set("cca", cca ? "true" : "false");
    return this.request<ExploreResult>(
      "GET",
      `/api/v1/fields/${encodeURIComponent(fieldId)}/explore?${query.toString()}`,
    );
  }

  async runStage(
    fieldId: string,
    stage: string,
    params: Record<string, unknown> = {},
  ): Promise<AnalysisResult> {
    return this.request<AnalysisResult>(
      "POST",
      `/api/v1/fields/${encodeURIComponent(fieldId)}/analysis/${encodeURIComponent(stage)}`,
      params,
    );
  }

  async getArtifact(fieldId: string, artifactId: string): Promise<ArtifactDetail> {
    return this.request<ArtifactDetail>(
      "GET",
      `/api/v1/fields/${encodeURIComponent(fieldId)}/artifacts/${encodeURIComponent(artifactId)}`,
    );
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    const text = await response.text();
    let parsed: unknown = null;
    if (text) {
      try {
        parsed = JSON.parse(text);
      } catch {
        parsed = null;
      }
    }
    if (!response.ok) {
      const fallback: ErrorBody = {
        code: `http-${response.status}`,
        message: text || response.statusText,
        path,
      };
      const errorBody = isErrorBody(parsed) ? parsed : fallback;
      throw new ApiError(response.status, errorBody);
    }
    return parsed as T;
  }
}

function isErrorBody(value: unknown): value is ErrorBody {
  if (typeof value !== "object" || value === null) return false;
  const record = value as Record<string, unknown>;
  return typeof record.code === "string" && typeof record.message === "string";
}
