import { labelColor } from "../palette.js";
import type { AttributeColumn, Distribution, Predicate } from "../types.js";

/** Filter widget panel, one block per attribute. Numeric attributes get
 * lower/upper inputs, categorical ones a checkbox per category. The
 * category lists come from the last expanded rule's distribution
 * payload (the level payload itself does not carry them); until one is
 * loaded those widgets show a hint instead of boxes. Each block is
 * scented with the per-label counts of displayed rules using it. */
export function renderWidgets(
  attributes: AttributeColumn[],
  distributions: Record<string, Distribution> | null,
): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "widgets";

  for (const col of attributes) {
    const block = document.createElement("div");
    block.className = `widget ${col.kind}`;
    block.dataset.attr = col.name;

    const head = document.createElement("div");
    head.className = "widget-head";
    const name = document.createElement("span");
    name.className = "widget-name";
    name.textContent = col.name;
    head.appendChild(name);
    const scent = document.createElement("span");
    scent.className = "scent";
    Object.entries(col.rule_counts).forEach(([cls, count], k) => {
      const seg = document.createElement("span");
      seg.className = "scent-seg";
      seg.dataset.class = cls;
      seg.textContent = String(count);
      seg.style.color = labelColor(k);
      seg.title = `${count} displayed ${cls} rules use ${col.name}`;
      scent.appendChild(seg);
    });
    head.appendChild(scent);
    block.appendChild(head);

    if (col.kind === "numeric") {
      const lower = document.createElement("input");
      lower.type = "number";
      lower.className = "w-lower";
      lower.placeholder = "min";
      const upper = document.createElement("input");
      upper.type = "number";
      upper.className = "w-upper";
      upper.placeholder = "max";
      block.appendChild(lower);
      block.appendChild(upper);
    } else {
      const dist = distributions ? distributions[col.name] : undefined;
      if (dist !== undefined && dist.kind === "categorical") {
        for (const category of dist.categories) {
          const label = document.createElement("label");
          label.className = "w-category";
          const box = document.createElement("input");
          box.type = "checkbox";
          box.className = "w-cat-box";
          box.dataset.category = category;
          label.appendChild(box);
          label.appendChild(document.createTextNode(category));
          block.appendChild(label);
        }
      } else {
        const hint = document.createElement("div");
        hint.className = "widget-hint";
        hint.textContent = "expand a rule to list categories";
        block.appendChild(hint);
      }
    }
    panel.appendChild(block);
  }

  const apply = document.createElement("button");
  apply.id = "apply-filter";
  apply.textContent = "apply filter";
  panel.appendChild(apply);
  const clear = document.createElement("button");
  clear.id = "clear-filter";
  clear.textContent = "clear";
  panel.appendChild(clear);
  return panel;
}

/** Read the panel back into filter predicates; untouched widgets
 * contribute nothing. */
export function collectPredicates(panel: HTMLElement): Predicate[] {
  const predicates: Predicate[] = [];
  for (const block of panel.querySelectorAll<HTMLElement>(".widget")) {
    const attr = block.dataset.attr!;
    if (block.classList.contains("numeric")) {
      const lower = block.querySelector<HTMLInputElement>(".w-lower")!.value;
      const upper = block.querySelector<HTMLInputElement>(".w-upper")!.value;
      const pred: Predicate = { attribute: attr };
      if (lower !== "") pred.lower = Number(lower);
      if (upper !== "") pred.upper = Number(upper);
      if (pred.lower !== undefined || pred.upper !== undefined) {
        predicates.push(pred);
      }
    } else {
      const checked = [
        ...block.querySelectorAll<HTMLInputElement>(".w-cat-box:checked"),
      ].map((box) => box.dataset.category!);
      if (checked.length > 0) {
        predicates.push({ attribute: attr, categories: checked });
      }
    }
  }
  return predicates;
}
