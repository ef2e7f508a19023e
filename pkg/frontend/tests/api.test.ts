import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

interface Recorded {
  url: string;
  init?: RequestInit;
}

function mockFetch(status: number, body: unknown): Recorded[] {
  const recorded: Recorded[] = [];
  const text = typeof body === "string" ? body : JSON.stringify(body);
  vi.stubGlobal(
    "fetch",
    vi.fn(async (url: string, init?: RequestInit) => {
      recorded.push({ url, init });
      return {
        ok: status >= 200 && status < 300,
        status,
        statusText: `status ${status}`,
        text: async () => text,
      };
    }),
  );
  return recorded;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient", () => {
  it("prefixes every path with the configured base url", async () => {
    const recorded = mockFetch(200, { status: "ok", model: null });
    await new ApiClient("http://api.example:8000").health();
    expect(recorded[0].url).toBe("http://api.example:8000/health");
    expect(recorded[0].init?.method).toBe("GET");
  });

  it("posts session creation options as the body", async () => {
    const recorded = mockFetch(200, { session: "s1", level: {} });
    const env = await new ApiClient().createSession({ budget: 12 });
    expect(env.session).toBe("s1");
    expect(recorded[0].url).toBe("/sessions");
    expect(JSON.parse(String(recorded[0].init?.body))).toEqual({ budget: 12 });
    expect((recorded[0].init?.headers as Record<string, string>)["content-type"]).toBe(
      "application/json",
    );
  });

  it("sends zoom selections under the selected key and unwraps the level", async () => {
    const recorded = mockFetch(200, { session: "s1", level: { depth: 1 } });
    const level = await new ApiClient().zoom("s1", [281, 427]);
    expect(recorded[0].url).toBe("/sessions/s1/zoom");
    expect(JSON.parse(String(recorded[0].init?.body))).toEqual({
      selected: [281, 427],
    });
    expect(level).toEqual({ depth: 1 });
  });

  it("posts back with no body", async () => {
    const recorded = mockFetch(200, { session: "s1", level: { depth: 0 } });
    await new ApiClient().back("s1");
    expect(recorded[0].url).toBe("/sessions/s1/back");
    expect(recorded[0].init?.body).toBeUndefined();
  });

  it("passes order requests through verbatim", async () => {
    const recorded = mockFetch(200, { session: "s1", level: {} });
    await new ApiClient().order("s1", {
      mode: "group",
      attribute: "PriorDefault",
      pinned: ["Income"],
    });
    expect(JSON.parse(String(recorded[0].init?.body))).toEqual({
      mode: "group",
      attribute: "PriorDefault",
      pinned: ["Income"],
    });
  });

  it("wraps filter predicates", async () => {
    const recorded = mockFetch(200, { before: {}, after: {}, matching_sample_ids: [] });
    await new ApiClient().filter("s1", [{ attribute: "Age", lower: 30 }]);
    expect(recorded[0].url).toBe("/sessions/s1/filter");
    expect(JSON.parse(String(recorded[0].init?.body))).toEqual({
      predicates: [{ attribute: "Age", lower: 30 }],
    });
  });

  it("builds sample queries only from given parameters", async () => {
    const recorded = mockFetch(200, { total: 0, page: 0, page_size: 50, rows: [] });
    const client = new ApiClient();
    await client.samples("s1");
    await client.samples("s1", { sort: "Age", dir: "desc", page: 2 });
    expect(recorded[0].url).toBe("/sessions/s1/samples");
    expect(recorded[1].url).toBe("/sessions/s1/samples?sort=Age&dir=desc&page=2");
  });

  it("raises ApiError with the server's detail string", async () => {
    mockFetch(422, { detail: "unknown metric: zzz" });
    const err = await new ApiClient()
      .order("s1", { mode: "metric", metric: "coverage" })
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(422);
    expect((err as ApiError).message).toBe("unknown metric: zzz");
  });

  it("falls back to raw text when the error body is not json", async () => {
    mockFetch(502, "bad gateway");
    const err = await new ApiClient().health().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).message).toBe("bad gateway");
  });
});
