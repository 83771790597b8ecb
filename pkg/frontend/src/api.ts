import type { ModelInfo, PlayerSummary, PredictResponse, RosterResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(detail);
  }
}

async function request<T>(base: string, path: string, body?: unknown): Promise<T> {
  const resp = await fetch(base + path, {
    method: body === undefined ? "GET" : "POST",
    headers: body === undefined ? undefined : { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const payload = await resp.json();
      if (typeof payload.detail === "string") detail = payload.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

/** Thin typed client over the prediction service. Every verdict shown in the
 * UI comes from these calls; nothing is classified locally. */
export class ServiceClient {
  constructor(private readonly base: string = "") {}

  async players(): Promise<PlayerSummary[]> {
    const body = await request<{ players: PlayerSummary[] }>(this.base, "/players");
    return body.players;
  }

  model(): Promise<ModelInfo> {
    return request<ModelInfo>(this.base, "/model");
  }

  predict(players: string[]): Promise<PredictResponse> {
    return request<PredictResponse>(this.base, "/predict", { players });
  }

  roster(players: string[]): Promise<RosterResponse> {
    return request<RosterResponse>(this.base, "/roster", { players });
  }
}
