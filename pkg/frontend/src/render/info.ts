import { labelColor } from "../palette.js";
import type { FilterResult, LevelInfo, LevelMetrics } from "../types.js";

function countBars(
  title: string,
  counts: Record<string, number>,
  kind: string,
): HTMLElement {
  const box = document.createElement("div");
  box.className = `count-bars ${kind}`;
  const heading = document.createElement("div");
  heading.className = "bars-title";
  heading.textContent = title;
  box.appendChild(heading);
  const total = Math.max(
    1,
    Object.values(counts).reduce((a, b) => a + b, 0),
  );
  Object.entries(counts).forEach(([cls, count], k) => {
    const row = document.createElement("div");
    row.className = "bar-row";
    row.dataset.class = cls;
    const label = document.createElement("span");
    label.className = "bar-label";
    label.textContent = cls;
    const bar = document.createElement("span");
    bar.className = "bar";
    bar.style.width = `${(100 * count) / total}%`;
    bar.style.backgroundColor = labelColor(k);
    const value = document.createElement("span");
    value.className = "bar-value";
    value.textContent = String(count);
    row.appendChild(label);
    row.appendChild(bar);
    row.appendChild(value);
    box.appendChild(row);
  });
  return box;
}

/** Level statistics plus, when a filter ran, the before/after class
 * distribution of the matching training samples. Every number is shown
 * exactly as the service sent it. */
export function renderInfo(
  info: LevelInfo,
  metrics: LevelMetrics | null,
  filter: FilterResult | null,
): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "info";

  const dl = document.createElement("dl");
  const facts: [string, unknown][] = [
    ["depth", info.depth],
    ["displayed rules", info.displayed_rules],
    ["scope size", info.scope_size],
    ["mean confidence", info.mean_confidence],
    ["mean anomaly", info.mean_anomaly],
  ];
  if (metrics !== null) {
    facts.push(
      ["train fidelity", metrics.fidelity_train],
      ["test fidelity", metrics.fidelity_test],
      ["margin", metrics.margin],
      ["tradeoff", metrics.tradeoff],
    );
  }
  for (const [key, value] of facts) {
    const dt = document.createElement("dt");
    dt.textContent = key;
    const dd = document.createElement("dd");
    dd.dataset.fact = key;
    dd.textContent = String(value);
    dl.appendChild(dt);
    dl.appendChild(dd);
  }
  panel.appendChild(dl);

  panel.appendChild(countBars("displayed rules by label", info.rule_counts, "rules"));
  panel.appendChild(
    countBars("covered samples by class", info.covered_samples, "covered"),
  );

  if (filter !== null) {
    const split = document.createElement("div");
    split.className = "filter-shift";
    split.appendChild(countBars("before filter", filter.before, "before"));
    split.appendChild(countBars("after filter", filter.after, "after"));
    const matched = document.createElement("div");
    matched.className = "filter-matched";
    matched.textContent = `${filter.matching_sample_ids.length} training samples match`;
    split.appendChild(matched);
    panel.appendChild(split);
  }
  return panel;
}
