/**
 * Point table with server-side filtering/paging, row selection and the
 * mark-unreachable action (one POST per selected point; conflicts surface
 * as per-row badges without dropping the rest of the batch).
 */

import { ApiError, Client, PointFilter } from "./api";
import { PointView, Summary } from "./types";
import { TABLE_COLUMNS, TableRow, pageCount, toRow } from "./viewmodel";

export interface TableState {
  filter: PointFilter;
  selected: Set<number>;
  rowErrors: Map<number, string>;
  totalMatched: number;
}

export class PointTable {
  state: TableState = {
    filter: { page: 0, page_size: 50 },
    selected: new Set(),
    rowErrors: new Map(),
    totalMatched: 0,
  };
  onSummary: (s: Summary) => void = () => undefined;

  constructor(private client: Client, private root: HTMLElement) {}

  async refresh(): Promise<void> {
    const page = await this.client.points(this.state.filter);
    this.state.totalMatched = page.total_matched;
    this.render(page.items.map(toRow));
  }

  private render(rows: TableRow[]): void {
    this.root.innerHTML = "";
    this.root.appendChild(this.controls());
    const table = document.createElement("table");
    table.className = "points";
    const head = table.insertRow();
    head.insertCell().textContent = "";
    for (const col of TABLE_COLUMNS) {
      head.insertCell().textContent = col;
    }
    head.insertCell().textContent = "";
    for (const row of rows) {
      const tr = table.insertRow();
      tr.dataset.index = String(row.point.index);
      const sel = tr.insertCell();
      if (row.selectable) {
        const box = document.createElement("input");
        box.type = "checkbox";
        box.checked = this.state.selected.has(row.point.index);
        box.onchange = () => {
          if (box.checked) this.state.selected.add(row.point.index);
          else this.state.selected.delete(row.point.index);
        };
        sel.appendChild(box);
      }
      for (const cell of row.cells) {
        tr.insertCell().textContent = cell;
      }
      const err = tr.insertCell();
      const msg = this.state.rowErrors.get(row.point.index);
      if (msg) {
        err.textContent = msg;
        err.className = "row-error";
      }
    }
    this.root.appendChild(table);
  }

  private controls(): HTMLElement {
    const bar = document.createElement("div");
    bar.className = "table-controls";

    const status = document.createElement("select");
    status.id = "filter-status";
    for (const opt of ["", "open", "covered", "unreachable"]) {
      const o = document.createElement("option");
      o.value = opt;
      o.textContent = opt || "any status";
      status.appendChild(o);
    }
    status.value = this.state.filter.status ?? "";
    status.onchange = () => this.setFilter({ status: status.value || undefined, page: 0 });

    const gate = document.createElement("input");
    gate.id = "filter-gate";
    gate.placeholder = "gate glob";
    gate.value = this.state.filter.gate ?? "";
    gate.onchange = () => this.setFilter({ gate: gate.value || undefined, page: 0 });

    const po = document.createElement("input");
    po.id = "filter-po";
    po.placeholder = "output glob";
    po.value = this.state.filter.po ?? "";
    po.onchange = () => this.setFilter({ po: po.value || undefined, page: 0 });

    const pager = document.createElement("span");
    pager.className = "pager";
    const pages = pageCount(this.state.totalMatched, this.state.filter.page_size ?? 50);
    pager.textContent = ` page ${(this.state.filter.page ?? 0) + 1}/${pages} ` +
      `(${this.state.totalMatched} points) `;
    const prev = document.createElement("button");
    prev.textContent = "prev";
    prev.onclick = () => this.setFilter({ page: Math.max(0, (this.state.filter.page ?? 0) - 1) });
    const next = document.createElement("button");
    next.textContent = "next";
    next.onclick = () => this.setFilter({
      page: Math.min(pages - 1, (this.state.filter.page ?? 0) + 1) });

    const mark = document.createElement("button");
    mark.id = "mark-unreachable";
    mark.textContent = "mark selected unreachable";
    mark.onclick = () => void this.annotateSelected();

    for (const el of [status, gate, po, prev, pager, next, mark]) {
      bar.appendChild(el);
    }
    return bar;
  }

  private setFilter(patch: Partial<PointFilter>): void {
    this.state.filter = { ...this.state.filter, ...patch };
    void this.refresh();
  }

  /** One documented API call per selected point; 409s stay as row badges. */
  async annotateSelected(reason = "marked unreachable in UI", author = "ui"): Promise<void> {
    const targets = [...this.state.selected].sort((a, b) => a - b);
    if (!targets.length) return;
    const page = await this.client.points({
      ...this.state.filter, page: this.state.filter.page ?? 0 });
    const byIndex = new Map(page.items.map((p) => [p.index, p]));
    let summary: Summary | null = null;
    for (const idx of targets) {
      const p = byIndex.get(idx);
      if (!p) continue;
      try {
        summary = await this.client.markUnreachable({
          gate: p.gate, out: p.out, m: p.m, po: p.po, reason, author,
        });
        this.state.selected.delete(idx);
        this.state.rowErrors.delete(idx);
      } catch (e) {
        if (e instanceof ApiError) {
          this.state.rowErrors.set(idx, `${e.status}: ${e.detail}`);
        } else {
          throw e;
        }
      }
    }
    if (summary) this.onSummary(summary);
    await this.refresh();
  }
}
