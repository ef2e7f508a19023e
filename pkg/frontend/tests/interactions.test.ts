import { beforeEach, describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { App } from "../src/app.js";
import type { LevelPayload } from "../src/types.js";
import { FakeApi, fixtures, flush } from "./helpers.js";

function makeApp(api: FakeApi): { app: App; el: HTMLElement } {
  const el = document.createElement("div");
  document.body.appendChild(el);
  const app = new App(el, api);
  return { app, el };
}

function rowIds(el: HTMLElement): number[] {
  return [...el.querySelectorAll<HTMLElement>("tbody tr.rule-row")].map((tr) =>
    Number(tr.dataset.id),
  );
}

function click(el: Element): void {
  el.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

function brush(el: HTMLElement, id: number): void {
  const box = el.querySelector<HTMLInputElement>(`input.brush[data-id="${id}"]`)!;
  box.checked = !box.checked;
  box.dispatchEvent(new Event("change", { bubbles: true }));
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("App interactions", () => {
  it("renders the 80 credit rules after starting a session", async () => {
    const api = new FakeApi().on("createSession", () => ({
      session: "s1",
      level: fixtures.root(),
    }));
    const { app, el } = makeApp(api);
    await app.start();
    expect(rowIds(el).length).toBe(80);
    expect(api.count("createSession")).toBe(1);
    expect(api.calls.length).toBe(1);
  });

  it("clicking an attribute header regroups with unused rules last", async () => {
    const api = new FakeApi()
      .on("createSession", () => ({ session: "s1", level: fixtures.root() }))
      .on("order", () => fixtures.group());
    const { app, el } = makeApp(api);
    await app.start();

    click(el.querySelector('th.attr[data-attr="PriorDefault"]')!);
    await flush();

    expect(api.count("order")).toBe(1);
    expect(api.lastArgs("order")[1]).toEqual({
      mode: "group",
      attribute: "PriorDefault",
      pinned: [],
    });

    const grouped = fixtures.group();
    expect(rowIds(el)).toEqual(grouped.row_order);

    // rules without a PriorDefault condition must form the table's tail
    const byId = new Map(grouped.rules.map((r) => [r.id, r]));
    const usesAttr = rowIds(el).map(
      (id) => "PriorDefault" in byId.get(id)!.conditions,
    );
    const firstUnused = usesAttr.indexOf(false);
    expect(firstUnused).toBeGreaterThan(0);
    expect(usesAttr.slice(firstUnused).every((used) => !used)).toBe(true);
  });

  it("zooming on two brushed rows keeps them displayed and indented", async () => {
    const api = new FakeApi()
      .on("createSession", () => ({ session: "s1", level: fixtures.group() }))
      .on("zoom", () => fixtures.zoom());
    const { app, el } = makeApp(api);
    await app.start();

    const picked = fixtures.zoomSelected().selected;
    const before = parseFloat(
      el.querySelector<HTMLElement>("td.glyph")!.style.paddingLeft,
    );
    brush(el, picked[0]);
    brush(el, picked[1]);
    click(el.querySelector("#zoom-btn")!);
    await flush();

    expect(api.count("zoom")).toBe(1);
    expect(api.lastArgs("zoom")[1]).toEqual([...picked].sort((a, b) => a - b));
    const ids = rowIds(el);
    expect(ids).toContain(picked[0]);
    expect(ids).toContain(picked[1]);
    const after = parseFloat(
      el.querySelector<HTMLElement>("td.glyph")!.style.paddingLeft,
    );
    expect(after).toBeGreaterThan(before);
  });

  it("back restores the previous level DOM exactly", async () => {
    const api = new FakeApi()
      .on("createSession", () => ({ session: "s1", level: fixtures.root() }))
      .on("order", () => fixtures.group())
      .on("zoom", () => fixtures.zoom())
      .on("back", () => fixtures.back());
    const { app, el } = makeApp(api);
    await app.start();

    click(el.querySelector('th.attr[data-attr="PriorDefault"]')!);
    await flush();
    const matrix = el.querySelector<HTMLElement>("#matrix")!;
    const groupedHtml = matrix.innerHTML;
    const groupedIds = rowIds(el);

    const picked = fixtures.zoomSelected().selected;
    brush(el, picked[0]);
    brush(el, picked[1]);
    click(el.querySelector("#zoom-btn")!);
    await flush();
    expect(rowIds(el)).not.toEqual(groupedIds);

    click(el.querySelector("#back-btn")!);
    await flush();
    expect(api.count("back")).toBe(1);
    expect(rowIds(el)).toEqual(groupedIds);
    expect(matrix.innerHTML).toBe(groupedHtml);
  });

  it("metric header clicks sort desc first, then toggle to asc", async () => {
    const requests: unknown[] = [];
    const api = new FakeApi()
      .on("createSession", () => ({ session: "s1", level: fixtures.root() }))
      .on("order", (...args: unknown[]) => {
        requests.push(args[1]);
        return fixtures.anomalyDesc();
      });
    const { app, el } = makeApp(api);
    await app.start();

    click(el.querySelector('th.metric-head[data-metric="anomaly"]')!);
    await flush();
    click(el.querySelector('th.metric-head[data-metric="anomaly"]')!);
    await flush();

    expect(requests).toEqual([
      { mode: "metric", metric: "anomaly", direction: "desc", pinned: [] },
      { mode: "metric", metric: "anomaly", direction: "asc", pinned: [] },
    ]);
  });

  it("ignores further mutations while one is in flight", async () => {
    let release: (level: LevelPayload) => void = () => {};
    const api = new FakeApi()
      .on("createSession", () => ({ session: "s1", level: fixtures.root() }))
      .on("zoom", () => new Promise<LevelPayload>((resolve) => (release = resolve)));
    const { app, el } = makeApp(api);
    await app.start();

    brush(el, fixtures.root().row_order[0]);
    const zoomBtn = el.querySelector<HTMLButtonElement>("#zoom-btn")!;
    click(zoomBtn);
    click(zoomBtn);
    click(el.querySelector('th.attr[data-attr="Age"]')!);
    await flush(1);

    expect(zoomBtn.disabled).toBe(true);
    expect(el.querySelector<HTMLButtonElement>("#back-btn")!.disabled).toBe(true);
    expect(api.count("zoom")).toBe(1);
    expect(api.count("order")).toBe(0);

    release(fixtures.zoom());
    await flush();
    expect(zoomBtn.disabled).toBe(false);
    expect(rowIds(el).length).toBe(80);
  });

  it("surfaces rejected requests inline and keeps the level", async () => {
    const recorded = fixtures.error();
    const api = new FakeApi()
      .on("createSession", () => ({ session: "s1", level: fixtures.root() }))
      .on("order", () => {
        throw new ApiError(recorded.status, recorded.detail);
      });
    const { app, el } = makeApp(api);
    await app.start();
    const before = rowIds(el);

    click(el.querySelector('th.metric-head[data-metric="anomaly"]')!);
    await flush();

    const banner = el.querySelector<HTMLElement>("#error-banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toBe(
      `error ${recorded.status}: ${recorded.detail}`,
    );
    expect(rowIds(el)).toEqual(before);

    click(banner);
    expect(banner.hidden).toBe(true);
  });

  it("dropping a header on the pin zone re-orders with the pinned list", async () => {
    const requests: unknown[] = [];
    const api = new FakeApi()
      .on("createSession", () => ({ session: "s1", level: fixtures.root() }))
      .on("order", (...args: unknown[]) => {
        requests.push(args[1]);
        return fixtures.pinned();
      });
    const { app, el } = makeApp(api);
    await app.start();

    const head = el.querySelector('th.attr[data-attr="PriorDefault"]')!;
    head.dispatchEvent(new Event("dragstart", { bubbles: true }));
    el.querySelector("#pin-zone")!.dispatchEvent(new Event("drop", { bubbles: true }));
    await flush();

    expect(requests).toEqual([
      {
        mode: "metric",
        metric: "coverage",
        direction: "desc",
        pinned: ["PriorDefault"],
      },
    ]);
    const heads = [...el.querySelectorAll<HTMLElement>("th.attr")];
    expect(heads[0].dataset.attr).toBe("PriorDefault");
    expect(heads[0].classList.contains("pinned")).toBe(true);
  });

  it("applying a filter posts the predicates and shows the class shift", async () => {
    const api = new FakeApi()
      .on("createSession", () => ({ session: "s1", level: fixtures.root() }))
      .on("filter", () => fixtures.filterShift())
      .on("info", () => fixtures.info());
    const { app, el } = makeApp(api);
    await app.start();

    const ageWidget = el.querySelector<HTMLElement>('.widget[data-attr="Age"]')!;
    ageWidget.querySelector<HTMLInputElement>(".w-lower")!.value = "30";
    click(el.querySelector("#apply-filter")!);
    await flush();

    expect(api.count("filter")).toBe(1);
    expect(api.lastArgs("filter")[1]).toEqual([{ attribute: "Age", lower: 30 }]);

    const infoPane = el.querySelector<HTMLElement>("#info-pane")!;
    expect(infoPane.hidden).toBe(false);
    const shift = fixtures.filterShift();
    const beforeBars = infoPane.querySelectorAll<HTMLElement>(
      ".count-bars.before .bar-value",
    );
    const afterBars = infoPane.querySelectorAll<HTMLElement>(
      ".count-bars.after .bar-value",
    );
    expect([...beforeBars].map((b) => b.textContent)).toEqual(
      Object.values(shift.before).map(String),
    );
    expect([...afterBars].map((b) => b.textContent)).toEqual(
      Object.values(shift.after).map(String),
    );
  });

  it("expanding a rule fetches its detail once and draws the overlay", async () => {
    const detail = fixtures.detail();
    const api = new FakeApi()
      .on("createSession", () => ({ session: "s1", level: fixtures.root() }))
      .on("ruleDetail", () => fixtures.detail());
    const { app, el } = makeApp(api);
    await app.start();

    const row = el.querySelector<HTMLElement>(`tr.rule-row[data-id="${detail.id}"]`)!;
    click(row);
    await flush();

    expect(api.count("ruleDetail")).toBe(1);
    expect(api.lastArgs("ruleDetail")[1]).toBe(detail.id);
    const panel = el.querySelector<HTMLElement>("tr.detail-row .rule-detail")!;
    expect(panel.dataset.id).toBe(String(detail.id));
    const charts = panel.querySelectorAll(".dist");
    expect(charts.length).toBe(Object.keys(detail.distributions).length);

    // collapsing needs no further call
    click(el.querySelector<HTMLElement>(`tr.rule-row[data-id="${detail.id}"]`)!);
    await flush();
    expect(api.count("ruleDetail")).toBe(1);
    expect(el.querySelector("tr.detail-row")).toBeNull();
  });

  it("opening the data tab pages through covered samples", async () => {
    const queries: unknown[] = [];
    const api = new FakeApi()
      .on("createSession", () => ({ session: "s1", level: fixtures.root() }))
      .on("samples", (...args: unknown[]) => {
        queries.push(args[1]);
        return fixtures.samples();
      });
    const { app, el } = makeApp(api);
    await app.start();

    click(el.querySelector('.tab[data-tab="data"]')!);
    await flush();
    expect(queries).toEqual([{ sort: undefined, dir: undefined, page: 0 }]);
    const table = el.querySelector<HTMLElement>("#data-pane table.samples")!;
    expect(table.querySelectorAll("tbody tr").length).toBe(
      fixtures.samples().rows.length,
    );

    click(el.querySelector("#page-next")!);
    await flush();
    expect(queries[1]).toEqual({ sort: undefined, dir: undefined, page: 1 });

    click(el.querySelector('th.sortable[data-sort="Age"]')!);
    await flush();
    expect(queries[2]).toEqual({ sort: "Age", dir: "asc", page: 0 });
  });
});
