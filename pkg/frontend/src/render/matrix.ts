import { labelColor, labelWash } from "../palette.js";
import type { LevelPayload, RuleRow } from "../types.js";

/** Metric columns on the right edge of the matrix, in display order. */
export const METRIC_COLUMNS = ["confidence", "coverage", "anomaly"] as const;

export interface MatrixOptions {
  selection?: Set<number>;
  attrPage?: number;
}

function bad(message: string): HTMLElement {
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.textContent = message;
  return banner;
}

function isMalformed(payload: LevelPayload): string | null {
  if (!payload || typeof payload !== "object") return "payload is not an object";
  if (!Array.isArray(payload.rules)) return "payload has no rules array";
  if (!Array.isArray(payload.row_order)) return "payload has no row order";
  if (!Array.isArray(payload.attribute_order)) return "payload has no attribute order";
  if (!Array.isArray(payload.attributes)) return "payload has no attribute stats";
  const byId = new Set(payload.rules.map((r) => r.id));
  for (const id of payload.row_order) {
    if (!byId.has(id)) return `row order references missing rule ${id}`;
  }
  return null;
}

function glyphCell(
  row: RuleRow,
  depth: number,
  maxNeighborhood: number,
  selected: boolean,
): HTMLTableCellElement {
  const td = document.createElement("td");
  td.className = "glyph";
  td.style.paddingLeft = `${6 + depth * 18}px`;

  const brush = document.createElement("input");
  brush.type = "checkbox";
  brush.className = "brush";
  brush.dataset.id = String(row.id);
  brush.checked = selected;
  td.appendChild(brush);

  const bar = document.createElement("span");
  bar.className = "glyph-bar";
  const frac = row.neighborhood_size / Math.max(1, maxNeighborhood);
  bar.style.width = `${6 + Math.round(44 * frac)}px`;
  bar.title = `${row.neighborhood_size} rules behind this representative`;
  td.appendChild(bar);

  const count = document.createElement("span");
  count.className = "glyph-count";
  count.textContent = String(row.neighborhood_size);
  td.appendChild(count);
  return td;
}

function conditionCell(row: RuleRow, attr: string): HTMLTableCellElement {
  const td = document.createElement("td");
  const cond = row.conditions[attr];
  if (cond === undefined) {
    td.className = "cell blank";
    return td;
  }
  td.className = "cell";
  if (cond.kind === "numeric") {
    const range = document.createElement("div");
    range.className = "range";
    const band = document.createElement("div");
    band.className = "band";
    const lo = Math.max(0, Math.min(1, cond.lower_q));
    const hi = Math.max(lo, Math.min(1, cond.upper_q));
    band.style.left = `${lo * 100}%`;
    band.style.width = `${(hi - lo) * 100}%`;
    const low = cond.lower === null ? "-inf" : String(cond.lower);
    const high = cond.upper === null ? "inf" : String(cond.upper);
    band.title = `(${low}, ${high}]`;
    range.appendChild(band);
    td.appendChild(range);
  } else {
    for (const name of cond.categories) {
      const chip = document.createElement("span");
      chip.className = "chip";
      chip.textContent = name;
      td.appendChild(chip);
    }
  }
  return td;
}

/** Build the rule-by-attribute matrix table for one level payload.
 * Pure DOM construction: no ordering or scoring happens here, rows and
 * columns come out exactly as the payload lists them. A malformed
 * payload yields an error banner element instead of a table. */
export function renderMatrix(
  payload: LevelPayload,
  options: MatrixOptions = {},
): HTMLElement {
  const problem = isMalformed(payload);
  if (problem !== null) return bad(`cannot render level: ${problem}`);

  const selection = options.selection ?? new Set<number>();
  const attrPage = options.attrPage ?? 0;
  const pageOf = new Map(payload.attributes.map((a) => [a.name, a.page]));
  const columns = payload.attribute_order.filter(
    (name) => (pageOf.get(name) ?? 0) === attrPage,
  );
  const byId = new Map(payload.rules.map((r) => [r.id, r]));
  const maxNeighborhood = Math.max(
    1,
    ...payload.rules.map((r) => r.neighborhood_size),
  );
  const arrows = new Set(payload.arrows);
  const pinned = new Set(payload.pinned);

  const table = document.createElement("table");
  table.className = "matrix";
  table.dataset.depth = String(payload.depth);

  const thead = table.createTHead();
  const head = thead.insertRow();
  const corner = document.createElement("th");
  corner.className = "corner";
  corner.textContent = "rules";
  head.appendChild(corner);
  for (const name of columns) {
    const th = document.createElement("th");
    th.className = "attr" + (pinned.has(name) ? " pinned" : "");
    th.dataset.attr = name;
    th.draggable = true;
    if (arrows.has(name)) {
      const up = document.createElement("span");
      up.className = "arrow";
      up.textContent = "▲";
      th.appendChild(up);
    }
    const label = document.createElement("span");
    label.className = "attr-name";
    label.textContent = name;
    th.appendChild(label);
    head.appendChild(th);
  }
  for (const metric of METRIC_COLUMNS) {
    const th = document.createElement("th");
    th.className =
      "metric-head" + (payload.sort_mode === metric ? " sort-active" : "");
    th.dataset.metric = metric;
    th.textContent = metric;
    head.appendChild(th);
  }

  const starts = new Map<number, number>();
  payload.boundaries.forEach((boundary, depthIdx) => {
    for (const span of boundary.groups) {
      const pos = span[0];
      starts.set(pos, Math.min(starts.get(pos) ?? depthIdx, depthIdx));
    }
  });

  const tbody = table.createTBody();
  payload.row_order.forEach((id, pos) => {
    const row = byId.get(id)!;
    const tr = tbody.insertRow();
    tr.className = "rule-row";
    tr.dataset.id = String(id);
    tr.dataset.label = String(row.label);
    tr.style.backgroundColor = labelWash(row.label);
    if (starts.has(pos)) {
      tr.classList.add(starts.get(pos) === 0 ? "group-start" : "subgroup-start");
    }
    tr.appendChild(glyphCell(row, payload.depth, maxNeighborhood, selection.has(id)));
    for (const name of columns) {
      tr.appendChild(conditionCell(row, name));
    }
    for (const metric of METRIC_COLUMNS) {
      const td = document.createElement("td");
      td.className = "metric";
      td.dataset.metric = metric;
      td.textContent = String(row[metric]);
      tr.appendChild(td);
    }
  });

  const tfoot = table.createTFoot();
  const cum = tfoot.insertRow();
  cum.className = "cumulative";
  const lead = document.createElement("td");
  lead.className = "corner";
  lead.textContent = "usage";
  cum.appendChild(lead);
  const stats = new Map(payload.attributes.map((a) => [a.name, a]));
  for (const name of columns) {
    const td = document.createElement("td");
    td.className = "cum";
    td.dataset.attr = name;
    const col = stats.get(name);
    if (col !== undefined) {
      const usage = document.createElement("span");
      usage.className = "usage-count";
      usage.textContent = String(col.usage);
      td.appendChild(usage);
      const bar = document.createElement("div");
      bar.className = "mini-bar";
      const entries = Object.entries(col.rule_counts);
      const total = Math.max(1, col.usage);
      entries.forEach(([cls, count], k) => {
        const seg = document.createElement("span");
        seg.className = "mini";
        seg.dataset.class = cls;
        seg.style.width = `${(100 * count) / total}%`;
        seg.style.backgroundColor = labelColor(k);
        seg.title = `${cls}: ${count}`;
        bar.appendChild(seg);
      });
      td.appendChild(bar);
    }
    cum.appendChild(td);
  }
  for (const metric of METRIC_COLUMNS) {
    const td = document.createElement("td");
    td.className = "cum-metric";
    td.dataset.metric = metric;
    cum.appendChild(td);
  }

  return table;
}
