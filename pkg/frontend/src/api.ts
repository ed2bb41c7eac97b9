import type {
  InstanceDoc,
  PlanDoc,
  SessionState,
  SolveRequest,
} from "./types.js";

/** Narrow fetch signature so tests can inject a scripted transport. */
export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

/** Non-2xx response; `detail` is the parsed body's detail field when present. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
    this.name = "ApiError";
  }
}

/** Thin typed client for the planning service; all state lives server-side. */
export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) =>
      globalThis.fetch(input, init),
  ) {}

  createInstance(doc: InstanceDoc): Promise<{ instance_id: string }> {
    return this.request("POST", "/instances", doc);
  }

  getInstance(instanceId: string): Promise<InstanceDoc> {
    return this.request("GET", `/instances/${instanceId}`);
  }

  startSolve(req: SolveRequest): Promise<{ session_id: string; status: string }> {
    return this.request("POST", "/solve", req);
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  cancelSession(sessionId: string): Promise<{ session_id: string; status: string }> {
    return this.request("POST", `/sessions/${sessionId}/cancel`);
  }

  getPlan(sessionId: string): Promise<PlanDoc> {
    return this.request("GET", `/sessions/${sessionId}/plan`);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers:
        body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    let payload: unknown = null;
    try {
      payload = await res.json();
    } catch {
      payload = null;
    }
    if (!res.ok) {
      const detail =
        payload !== null && typeof payload === "object" && "detail" in payload
          ? (payload as { detail: unknown }).detail
          : payload;
      throw new ApiError(res.status, detail);
    }
    return payload as T;
  }
}
