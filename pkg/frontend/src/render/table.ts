import type { SamplesPage } from "../types.js";

/** Paged table of the training/test samples covered at this level.
 * Column order follows the matrix attribute order; sorting and paging
 * are server round-trips wired up by the app shell. */
export function renderSamples(
  page: SamplesPage,
  columns: string[],
  sort: string | null,
  dir: "asc" | "desc",
): HTMLElement {
  const box = document.createElement("div");
  box.className = "data-table";

  const table = document.createElement("table");
  table.className = "samples";
  const head = table.createTHead().insertRow();
  for (const name of ["id", ...columns, "label", "split"]) {
    const th = document.createElement("th");
    th.textContent = name;
    if (columns.includes(name)) {
      th.className = "sortable" + (sort === name ? ` sorted-${dir}` : "");
      th.dataset.sort = name;
    }
    head.appendChild(th);
  }

  const body = table.createTBody();
  for (const record of page.rows) {
    const tr = body.insertRow();
    tr.className = "sample-row";
    tr.dataset.id = String(record.id);
    const cells = [
      String(record.id),
      ...columns.map((c) => String(record.values[c])),
      record.label,
      record.split,
    ];
    for (const text of cells) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
  }
  box.appendChild(table);

  const pager = document.createElement("div");
  pager.className = "pager";
  const prev = document.createElement("button");
  prev.id = "page-prev";
  prev.textContent = "prev";
  prev.disabled = page.page === 0;
  const label = document.createElement("span");
  label.className = "page-label";
  const pages = Math.max(1, Math.ceil(page.total / page.page_size));
  label.textContent = `page ${page.page + 1} of ${pages} (${page.total} samples)`;
  const next = document.createElement("button");
  next.id = "page-next";
  next.textContent = "next";
  next.disabled = (page.page + 1) * page.page_size >= page.total;
  pager.appendChild(prev);
  pager.appendChild(label);
  pager.appendChild(next);
  box.appendChild(pager);
  return box;
}
