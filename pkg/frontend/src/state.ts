import type { LevelPayload, Predicate } from "./types.js";

/** Client-side view state. The server owns every ordering and number;
 * this only tracks what the user currently points at. Selection and
 * expansion are pruned whenever a new level arrives so they always
 * refer to displayed rules. */
export class ViewModel {
  payload: LevelPayload | null = null;
  selection = new Set<number>();
  expanded: number | null = null;
  filters: Predicate[] = [];
  attrPage = 0;
  pinned: string[] = [];
  busy = false;

  setLevel(payload: LevelPayload): void {
    this.payload = payload;
    const displayed = new Set(payload.row_order);
    for (const id of [...this.selection]) {
      if (!displayed.has(id)) this.selection.delete(id);
    }
    if (this.expanded !== null && !displayed.has(this.expanded)) {
      this.expanded = null;
    }
    this.pinned = [...payload.pinned];
    this.attrPage = 0;
  }

  displayed(): Set<number> {
    return new Set(this.payload ? this.payload.row_order : []);
  }

  toggleSelect(id: number): boolean {
    if (!this.displayed().has(id)) return false;
    if (this.selection.has(id)) {
      this.selection.delete(id);
    } else {
      this.selection.add(id);
    }
    return true;
  }

  toggleExpand(id: number): void {
    if (!this.displayed().has(id)) return;
    this.expanded = this.expanded === id ? null : id;
  }
}
