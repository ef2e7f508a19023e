import { ApiError, type Api } from "./api.js";
import { renderRuleDetail } from "./render/detail.js";
import { renderInfo } from "./render/info.js";
import { renderMatrix } from "./render/matrix.js";
import { renderSamples } from "./render/table.js";
import { collectPredicates, renderWidgets } from "./render/widgets.js";
import { ViewModel } from "./state.js";
import type {
  FilterResult,
  LevelInfo,
  LevelPayload,
  OrderRequest,
  RuleDetail,
  SamplesPage,
  SessionOptions,
} from "./types.js";

const SKELETON = `
<div id="error-banner" hidden></div>
<div id="toolbar">
  <button id="zoom-btn" title="zoom into the brushed rules">zoom</button>
  <button id="back-btn" title="return to the previous level">back</button>
  <span id="pin-zone">drop a column here to pin / unpin</span>
  <span id="level-line"></span>
  <nav id="tabs">
    <button class="tab" data-tab="widgets">attributes</button>
    <button class="tab" data-tab="info">info</button>
    <button class="tab" data-tab="data">data</button>
  </nav>
</div>
<div id="matrix"></div>
<div id="side">
  <div id="widgets-pane" class="pane"></div>
  <div id="info-pane" class="pane" hidden></div>
  <div id="data-pane" class="pane" hidden></div>
</div>
`;

/** The application shell: owns the session, wires every interaction to
 * exactly one API call, and re-renders from the response. While a
 * mutating call is in flight further mutations are ignored and the
 * zoom/back controls are disabled. */
export class App {
  readonly vm = new ViewModel();
  sid = "";

  private lastDirection: "asc" | "desc" = "desc";
  private dragAttr: string | null = null;
  private lastDetail: RuleDetail | null = null;
  private lastFilter: FilterResult | null = null;
  private lastInfo: LevelInfo | null = null;
  private samplesPage: SamplesPage | null = null;
  private samplesSort: string | null = null;
  private samplesDir: "asc" | "desc" = "asc";

  constructor(
    private readonly root: HTMLElement,
    private readonly api: Api,
  ) {
    root.innerHTML = SKELETON;
    this.wire();
  }

  async start(options: SessionOptions = {}): Promise<void> {
    try {
      const env = await this.api.createSession(options);
      this.sid = env.session;
      this.vm.setLevel(env.level);
      this.renderLevel();
    } catch (err) {
      this.showError(err);
    }
  }

  // ---------------------------------------------------------------- plumbing

  private el<T extends HTMLElement>(selector: string): T {
    return this.root.querySelector(selector) as T;
  }

  private showError(err: unknown): void {
    const banner = this.el("#error-banner");
    banner.textContent =
      err instanceof ApiError
        ? `error ${err.status}: ${err.message}`
        : `error: ${err instanceof Error ? err.message : String(err)}`;
    banner.hidden = false;
  }

  private hideError(): void {
    this.el("#error-banner").hidden = true;
  }

  private setBusy(busy: boolean): void {
    this.el<HTMLButtonElement>("#zoom-btn").disabled = busy;
    this.el<HTMLButtonElement>("#back-btn").disabled = busy;
    this.root.classList.toggle("busy", busy);
  }

  /** Run one mutating call; drops re-entrant attempts instead of
   * queueing so the server sees at most one update per session. */
  private async mutate(fn: () => Promise<LevelPayload>): Promise<void> {
    if (this.vm.busy) return;
    this.vm.busy = true;
    this.setBusy(true);
    try {
      const level = await fn();
      this.vm.setLevel(level);
      this.hideError();
      this.renderLevel();
    } catch (err) {
      this.showError(err);
    } finally {
      this.vm.busy = false;
      this.setBusy(false);
    }
  }

  /** Re-issue the current ordering with a new pinned list. */
  private restateOrder(pinned: string[]): OrderRequest {
    const mode = this.vm.payload?.sort_mode ?? "coverage";
    if (mode.startsWith("group:")) {
      return { mode: "group", attribute: mode.slice(6), pinned };
    }
    if (mode.startsWith("reorder:")) {
      return { mode: "reorder", attributes: mode.slice(8).split(","), pinned };
    }
    const metric =
      mode === "confidence" || mode === "anomaly" ? mode : "coverage";
    return { mode: "metric", metric, direction: this.lastDirection, pinned };
  }

  // --------------------------------------------------------------- rendering

  renderLevel(): void {
    const payload = this.vm.payload;
    if (payload === null) return;

    const line = this.el("#level-line");
    line.textContent =
      `depth ${payload.depth} | ${payload.rules.length} of ` +
      `${payload.neighborhood_size} rules | scope ${payload.scope_size}` +
      ` | sorted by ${payload.sort_mode}`;

    const host = this.el("#matrix");
    host.innerHTML = "";
    host.appendChild(
      renderMatrix(payload, {
        selection: this.vm.selection,
        attrPage: this.vm.attrPage,
      }),
    );
    this.placeDetailRow();
    this.renderWidgetsPane();
    this.renderInfoPane();
    this.renderDataPane();
  }

  private placeDetailRow(): void {
    const expanded = this.vm.expanded;
    if (expanded === null || this.lastDetail?.id !== expanded) return;
    const row = this.root.querySelector<HTMLTableRowElement>(
      `tr.rule-row[data-id="${expanded}"]`,
    );
    if (row === null) return;
    const tr = document.createElement("tr");
    tr.className = "detail-row";
    const td = document.createElement("td");
    td.colSpan = row.cells.length;
    td.appendChild(renderRuleDetail(this.lastDetail));
    tr.appendChild(td);
    row.after(tr);
  }

  private renderWidgetsPane(): void {
    const payload = this.vm.payload;
    if (payload === null) return;
    const pane = this.el("#widgets-pane");
    pane.innerHTML = "";
    pane.appendChild(
      renderWidgets(payload.attributes, this.lastDetail?.distributions ?? null),
    );
  }

  private renderInfoPane(): void {
    const pane = this.el("#info-pane");
    pane.innerHTML = "";
    if (this.lastInfo === null) return;
    pane.appendChild(
      renderInfo(this.lastInfo, this.vm.payload?.metrics ?? null, this.lastFilter),
    );
  }

  private renderDataPane(): void {
    const pane = this.el("#data-pane");
    pane.innerHTML = "";
    if (this.samplesPage === null) return;
    pane.appendChild(
      renderSamples(
        this.samplesPage,
        this.vm.payload?.attribute_order ?? [],
        this.samplesSort,
        this.samplesDir,
      ),
    );
  }

  // -------------------------------------------------------------- data loads

  private async loadInfo(): Promise<void> {
    try {
      this.lastInfo = await this.api.info(this.sid);
      this.renderInfoPane();
    } catch (err) {
      this.showError(err);
    }
  }

  private async loadSamples(page: number): Promise<void> {
    try {
      this.samplesPage = await this.api.samples(this.sid, {
        sort: this.samplesSort ?? undefined,
        dir: this.samplesSort === null ? undefined : this.samplesDir,
        page,
      });
      this.renderDataPane();
    } catch (err) {
      this.showError(err);
    }
  }

  private async expandRule(id: number): Promise<void> {
    if (this.vm.expanded === id) {
      this.vm.toggleExpand(id);
      this.renderLevel();
      return;
    }
    try {
      this.lastDetail = await this.api.ruleDetail(this.sid, id);
      this.vm.toggleExpand(id);
      this.renderLevel();
    } catch (err) {
      this.showError(err);
    }
  }

  // ------------------------------------------------------------------ wiring

  private switchTab(tab: string): void {
    for (const pane of this.root.querySelectorAll<HTMLElement>(".pane")) {
      pane.hidden = pane.id !== `${tab}-pane`;
    }
    if (tab === "info" && this.lastInfo === null) void this.loadInfo();
    if (tab === "data" && this.samplesPage === null) void this.loadSamples(0);
  }

  private wire(): void {
    this.root.addEventListener("click", (event) => {
      const target = event.target as HTMLElement;

      if (target.closest("#error-banner")) {
        this.hideError();
        return;
      }
      const tab = target.closest<HTMLElement>(".tab");
      if (tab !== null) {
        this.switchTab(tab.dataset.tab!);
        return;
      }
      if (target.closest("#zoom-btn")) {
        const selected = [...this.vm.selection].sort((a, b) => a - b);
        if (selected.length === 0) return;
        void this.mutate(() => this.api.zoom(this.sid, selected));
        return;
      }
      if (target.closest("#back-btn")) {
        void this.mutate(() => this.api.back(this.sid));
        return;
      }
      const attrHead = target.closest<HTMLElement>("th.attr");
      if (attrHead !== null) {
        void this.mutate(() =>
          this.api.order(this.sid, {
            mode: "group",
            attribute: attrHead.dataset.attr!,
            pinned: this.vm.pinned,
          }),
        );
        return;
      }
      const metricHead = target.closest<HTMLElement>("th.metric-head");
      if (metricHead !== null) {
        const metric = metricHead.dataset.metric as
          | "coverage"
          | "confidence"
          | "anomaly";
        this.lastDirection =
          this.vm.payload?.sort_mode === metric && this.lastDirection === "desc"
            ? "asc"
            : "desc";
        void this.mutate(() =>
          this.api.order(this.sid, {
            mode: "metric",
            metric,
            direction: this.lastDirection,
            pinned: this.vm.pinned,
          }),
        );
        return;
      }
      if (target.id === "apply-filter") {
        const predicates = collectPredicates(this.el("#widgets-pane"));
        void this.applyFilter(predicates);
        return;
      }
      if (target.id === "clear-filter") {
        void this.applyFilter([]);
        return;
      }
      const sortHead = target.closest<HTMLElement>("th.sortable");
      if (sortHead !== null) {
        const name = sortHead.dataset.sort!;
        this.samplesDir =
          this.samplesSort === name && this.samplesDir === "asc" ? "desc" : "asc";
        this.samplesSort = name;
        void this.loadSamples(0);
        return;
      }
      if (target.id === "page-prev" && this.samplesPage !== null) {
        void this.loadSamples(this.samplesPage.page - 1);
        return;
      }
      if (target.id === "page-next" && this.samplesPage !== null) {
        void this.loadSamples(this.samplesPage.page + 1);
        return;
      }
      const row = target.closest<HTMLElement>("tr.rule-row");
      if (row !== null && !(target instanceof HTMLInputElement)) {
        void this.expandRule(Number(row.dataset.id));
        return;
      }
    });

    this.root.addEventListener("change", (event) => {
      const box = event.target as HTMLElement;
      if (box instanceof HTMLInputElement && box.classList.contains("brush")) {
        this.vm.toggleSelect(Number(box.dataset.id));
      }
    });

    this.root.addEventListener("dragstart", (event) => {
      const head = (event.target as HTMLElement).closest<HTMLElement>("th.attr");
      this.dragAttr = head?.dataset.attr ?? null;
    });
    this.root.addEventListener("dragover", (event) => {
      if (this.dragAttr !== null) event.preventDefault();
    });
    this.root.addEventListener("drop", (event) => {
      if (this.dragAttr === null) return;
      const zone = (event.target as HTMLElement).closest("#pin-zone");
      if (zone === null) return;
      event.preventDefault();
      const attr = this.dragAttr;
      this.dragAttr = null;
      const pinned = this.vm.pinned.includes(attr)
        ? this.vm.pinned.filter((name) => name !== attr)
        : [...this.vm.pinned, attr];
      void this.mutate(() => this.api.order(this.sid, this.restateOrder(pinned)));
    });
  }

  private async applyFilter(predicates: typeof this.vm.filters): Promise<void> {
    if (this.vm.busy) return;
    this.vm.busy = true;
    this.setBusy(true);
    try {
      this.lastFilter = await this.api.filter(this.sid, predicates);
      this.vm.filters = predicates;
      this.hideError();
      this.switchTab("info");
      this.renderInfoPane();
    } catch (err) {
      this.showError(err);
    } finally {
      this.vm.busy = false;
      this.setBusy(false);
    }
  }
}
