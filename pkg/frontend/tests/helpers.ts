import { readFileSync } from "node:fs";
import { join } from "node:path";

import type { Api, SessionEnvelope } from "../src/api.js";
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
} from "../src/types.js";

// jsdom rewrites import.meta.url, so resolve from the package root instead
export function loadFixture<T>(name: string): T {
  const path = join(process.cwd(), "tests", "fixtures", `${name}.json`);
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}

/** Fresh copies so a test mutating a payload cannot leak into another. */
export const fixtures = {
  root: () => loadFixture<LevelPayload>("root"),
  group: () => loadFixture<LevelPayload>("group_priordefault"),
  zoom: () => loadFixture<LevelPayload>("zoom"),
  zoomSelected: () => loadFixture<{ selected: number[] }>("zoom_selected"),
  back: () => loadFixture<LevelPayload>("back"),
  anomalyDesc: () => loadFixture<LevelPayload>("order_anomaly_desc"),
  pinned: () => loadFixture<LevelPayload>("order_pinned"),
  detail: () => loadFixture<RuleDetail>("rule_detail"),
  filterEmpty: () => loadFixture<FilterResult>("filter_empty"),
  filterShift: () => loadFixture<FilterResult>("filter_age_priordefault"),
  info: () => loadFixture<LevelInfo>("info"),
  samples: () => loadFixture<SamplesPage>("samples"),
  samplesByAge: () => loadFixture<SamplesPage>("samples_age_desc"),
  error: () => loadFixture<{ status: number; detail: string }>("error_unknown_metric"),
};

type AnyHandler = (...args: never[]) => unknown;

/** Scripted Api double: every call is logged, and each method resolves
 * through the handler a test installed (or rejects loudly if none). */
export class FakeApi implements Api {
  readonly calls: Array<{ method: string; args: unknown[] }> = [];
  private handlers = new Map<string, AnyHandler>();

  on(method: keyof Api, handler: AnyHandler): this {
    this.handlers.set(method, handler);
    return this;
  }

  count(method: keyof Api): number {
    return this.calls.filter((c) => c.method === method).length;
  }

  lastArgs(method: keyof Api): unknown[] {
    const matching = this.calls.filter((c) => c.method === method);
    return matching[matching.length - 1]?.args ?? [];
  }

  private invoke<T>(method: keyof Api, ...args: unknown[]): Promise<T> {
    this.calls.push({ method, args });
    const handler = this.handlers.get(method);
    if (handler === undefined) {
      return Promise.reject(new Error(`unexpected api call: ${method}`));
    }
    return Promise.resolve(handler(...(args as never[])) as T);
  }

  health(): Promise<Health> {
    return this.invoke("health");
  }
  createSession(options?: SessionOptions): Promise<SessionEnvelope> {
    return this.invoke("createSession", options);
  }
  level(sid: string): Promise<LevelPayload> {
    return this.invoke("level", sid);
  }
  zoom(sid: string, selected: number[]): Promise<LevelPayload> {
    return this.invoke("zoom", sid, selected);
  }
  back(sid: string): Promise<LevelPayload> {
    return this.invoke("back", sid);
  }
  order(sid: string, request: OrderRequest): Promise<LevelPayload> {
    return this.invoke("order", sid, request);
  }
  filter(sid: string, predicates: Predicate[]): Promise<FilterResult> {
    return this.invoke("filter", sid, predicates);
  }
  ruleDetail(sid: string, ruleId: number): Promise<RuleDetail> {
    return this.invoke("ruleDetail", sid, ruleId);
  }
  info(sid: string): Promise<LevelInfo> {
    return this.invoke("info", sid);
  }
  samples(sid: string, query?: SamplesQuery): Promise<SamplesPage> {
    return this.invoke("samples", sid, query);
  }
}

/** Let queued promise callbacks and re-renders run. */
export async function flush(times = 3): Promise<void> {
  for (let i = 0; i < times; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}
