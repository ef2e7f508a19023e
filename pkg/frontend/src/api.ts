import type {
  FilterResult,
  Health,
  LevelInfo,
  LevelPayload,
  OrderRequest,
  Predicate,
  RuleDetail,
  SamplesPage,
  SamplesQuery,
  SessionOptions,
} from "./types.js";

/** A non-2xx response; message carries the server's reason string. */
export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export interface SessionEnvelope {
  session: string;
  level: LevelPayload;
}

/** Every call the UI can make. App code and tests depend on this
 * interface, not on the fetch-backed class below. */
export interface Api {
  health(): Promise<Health>;
  createSession(options?: SessionOptions): Promise<SessionEnvelope>;
  level(sid: string): Promise<LevelPayload>;
  zoom(sid: string, selected: number[]): Promise<LevelPayload>;
  back(sid: string): Promise<LevelPayload>;
  order(sid: string, request: OrderRequest): Promise<LevelPayload>;
  filter(sid: string, predicates: Predicate[]): Promise<FilterResult>;
  ruleDetail(sid: string, ruleId: number): Promise<RuleDetail>;
  info(sid: string): Promise<LevelInfo>;
  samples(sid: string, query?: SamplesQuery): Promise<SamplesPage>;
}

interface Envelope {
  session: string;
  level: LevelPayload;
}

export class ApiClient implements Api {
  /** baseUrl: "" for same-origin, or e.g. "http://127.0.0.1:8000". */
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await fetch(this.baseUrl + path, init);
    const text = await resp.text();
    let parsed: unknown = null;
    try {
      parsed = text ? JSON.parse(text) : null;
    } catch {
      parsed = null;
    }
    if (!resp.ok) {
      const detail =
        parsed !== null && typeof parsed === "object" && "detail" in parsed
          ? String((parsed as { detail: unknown }).detail)
          : text || resp.statusText;
      throw new ApiError(resp.status, detail);
    }
    return parsed as T;
  }

  health(): Promise<Health> {
    return this.request("GET", "/health");
  }

  createSession(options: SessionOptions = {}): Promise<SessionEnvelope> {
    return this.request("POST", "/sessions", options);
  }

  async level(sid: string): Promise<LevelPayload> {
    const env = await this.request<Envelope>("GET", `/sessions/${sid}/level`);
    return env.level;
  }

  async zoom(sid: string, selected: number[]): Promise<LevelPayload> {
    const env = await this.request<Envelope>("POST", `/sessions/${sid}/zoom`, {
      selected,
    });
    return env.level;
  }

  async back(sid: string): Promise<LevelPayload> {
    const env = await this.request<Envelope>("POST", `/sessions/${sid}/back`);
    return env.level;
  }

  async order(sid: string, request: OrderRequest): Promise<LevelPayload> {
    const env = await this.request<Envelope>(
      "POST",
      `/sessions/${sid}/order`,
      request,
    );
    return env.level;
  }

  filter(sid: string, predicates: Predicate[]): Promise<FilterResult> {
    return this.request("POST", `/sessions/${sid}/filter`, { predicates });
  }

  ruleDetail(sid: string, ruleId: number): Promise<RuleDetail> {
    return this.request("GET", `/sessions/${sid}/rules/${ruleId}`);
  }

  info(sid: string): Promise<LevelInfo> {
    return this.request("GET", `/sessions/${sid}/info`);
  }

  samples(sid: string, query: SamplesQuery = {}): Promise<SamplesPage> {
    const params = new URLSearchParams();
    if (query.sort !== undefined) params.set("sort", query.sort);
    if (query.dir !== undefined) params.set("dir", query.dir);
    if (query.page !== undefined) params.set("page", String(query.page));
    const qs = params.toString();
    return this.request("GET", `/sessions/${sid}/samples${qs ? "?" + qs : ""}`);
  }
}
