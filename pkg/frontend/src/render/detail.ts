import type { Condition, Distribution, RuleDetail } from "../types.js";

function conditionText(attr: string, cond: Condition): string {
  if (cond.kind === "numeric") {
    const low = cond.lower === null ? "-inf" : String(cond.lower);
    const high = cond.upper === null ? "inf" : String(cond.upper);
    return `${attr} in (${low}, ${high}]`;
  }
  return `${attr} in {${cond.categories.join(", ")}}`;
}

/** One attribute's histogram: covered counts drawn over the full
 * training counts, both scaled to the training maximum so the overlay
 * reads as "this slice of that whole". */
function distributionChart(attr: string, dist: Distribution): HTMLElement {
  const box = document.createElement("div");
  box.className = "dist";
  box.dataset.attr = attr;

  const title = document.createElement("div");
  title.className = "dist-title";
  title.textContent = attr;
  box.appendChild(title);

  const chart = document.createElement("div");
  chart.className = "dist-chart";
  const max = Math.max(1, ...dist.training);
  const labels =
    dist.kind === "numeric"
      ? dist.training.map((_, i) => `bin ${i}`)
      : dist.categories;
  dist.training.forEach((trainCount, i) => {
    const col = document.createElement("div");
    col.className = "dist-col";
    col.title = `${labels[i]}: ${dist.covered[i]} of ${trainCount}`;
    const train = document.createElement("div");
    train.className = "bar-training";
    train.style.height = `${Math.round((100 * trainCount) / max)}%`;
    const covered = document.createElement("div");
    covered.className = "bar-covered";
    covered.style.height = `${Math.round((100 * dist.covered[i]) / max)}%`;
    col.appendChild(train);
    col.appendChild(covered);
    chart.appendChild(col);
  });
  box.appendChild(chart);
  return box;
}

/** Expanded view of one rule: its conditions spelled out plus the
 * covered-vs-training distribution overlay for every attribute. */
export function renderRuleDetail(detail: RuleDetail): HTMLElement {
  const box = document.createElement("div");
  box.className = "rule-detail";
  box.dataset.id = String(detail.id);

  const header = document.createElement("div");
  header.className = "detail-header";
  header.textContent =
    `rule ${detail.id} -> ${detail.label_name}` +
    ` | coverage ${detail.coverage} | confidence ${detail.confidence}` +
    ` | anomaly ${detail.anomaly}`;
  box.appendChild(header);

  const conds = document.createElement("ul");
  conds.className = "detail-conditions";
  for (const [attr, cond] of Object.entries(detail.conditions)) {
    const li = document.createElement("li");
    li.textContent = conditionText(attr, cond);
    conds.appendChild(li);
  }
  box.appendChild(conds);

  const charts = document.createElement("div");
  charts.className = "detail-charts";
  for (const [attr, dist] of Object.entries(detail.distributions)) {
    charts.appendChild(distributionChart(attr, dist));
  }
  box.appendChild(charts);
  return box;
}
