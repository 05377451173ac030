/**
 * Thin typed client over the themis service. Every response is validated;
 * API failures carry the server's {code, message, path} envelope.
 */

import { z } from "zod";
import {
  ErrorEnvelope,
  HealthPayload,
  ModelListPayload,
  ModelPayload,
  NetworkPayload,
  ReportPayload,
  RunListPayload,
  RunRecord,
  SensitivityPayload,
  WhatIfEdit,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly path: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseBody<T>(resp: Response, schema: z.ZodType<T>): Promise<T> {
  const body: unknown = await resp.json();
  if (!resp.ok) {
    const env = ErrorEnvelope.safeParse(body);
    if (env.success) {
      throw new ApiError(resp.status, env.data.code, env.data.message, env.data.path);
    }
    throw new ApiError(resp.status, "http_error", `HTTP ${resp.status}`, resp.url);
  }
  return schema.parse(body);
}

export class ThemisClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private get<T>(path: string, schema: z.ZodType<T>, signal?: AbortSignal): Promise<T> {
    return this.fetchFn(this.url(path), { signal }).then((r) => parseBody(r, schema));
  }

  private post<T>(path: string, body: unknown, schema: z.ZodType<T>): Promise<T> {
    return this.fetchFn(this.url(path), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => parseBody(r, schema));
  }

  health() {
    return this.get("/api/health", HealthPayload);
  }

  listModels() {
    return this.get("/api/models", ModelListPayload);
  }

  uploadModel(doc: unknown) {
    return this.post(
      "/api/models",
      doc,
      z.object({ model_id: z.string(), region_name: z.string() }),
    );
  }

  getModel(modelId: string) {
    return this.get(`/api/models/${modelId}`, ModelPayload);
  }

  listRuns() {
    return this.get("/api/runs", RunListPayload);
  }

  startRun(modelId: string, config: { seed?: number; samples?: number; tripwire?: number }) {
    return this.post("/api/runs", { model_id: modelId, config }, RunRecord);
  }

  getRun(runId: string) {
    return this.get(`/api/runs/${runId}`, RunRecord);
  }

  whatIf(runId: string, edits: WhatIfEdit[]) {
    return this.post(`/api/runs/${runId}/whatif`, { edits }, RunRecord);
  }

  report(runId: string, tripwire?: number) {
    const query = tripwire === undefined ? "" : `?tripwire=${tripwire}`;
    return this.get(`/api/runs/${runId}/report${query}`, ReportPayload);
  }

  sensitivity(runId: string, root: string, signal?: AbortSignal) {
    return this.get(`/api/runs/${runId}/sensitivity/${root}`, SensitivityPayload, signal);
  }

  network(runId: string) {
    return this.get(`/api/runs/${runId}/network`, NetworkPayload);
  }
}
