/**
 * Pure derivations from API payloads to page models.
 *
 * These functions add no information: table rows carry the payload fields
 * verbatim and the curve model is the row list re-shaped for plotting, so a
 * page renders byte-identical data to what the API returned.
 */

import { CurveRow, PointView, Summary } from "./types";

export function overviewHeadline(s: Summary): string {
  const pct = s.open ? (100 * s.covered) / s.open : 100;
  return `${s.covered}/${s.open} (${formatPct(pct)})`;
}

export function formatPct(p: number): string {
  return `${(Math.round(p * 100) / 100).toString()}%`;
}

export interface TableRow {
  point: PointView;          // untouched payload record
  cells: string[];           // display order for the table
  selectable: boolean;       // only open points may be marked unreachable
}

export const TABLE_COLUMNS = [
  "index", "gate", "out", "m", "po", "members", "alpha", "status", "first_cycle",
] as const;

export function toRow(p: PointView): TableRow {
  return {
    point: p,
    cells: [
      String(p.index), p.gate, p.out, p.m, p.po, p.members.join(" "),
      String(p.alpha), p.status, p.first_cycle === null ? "-" : String(p.first_cycle),
    ],
    selectable: p.status === "open",
  };
}

export function pageCount(totalMatched: number, pageSize: number): number {
  return Math.max(1, Math.ceil(totalMatched / pageSize));
}

export interface CurveModel {
  cycles: number[];
  gif: number[];
  stuck: number[] | null;    // null: single-line mode (no gate-level data)
  /** cycle indexes where both curves are flat relative to the previous cycle
   *  (compaction candidates) */
  flat: number[];
}

export function toCurveModel(rows: CurveRow[]): CurveModel {
  const cycles = rows.map((r) => r.cycle);
  const gif = rows.map((r) => r.gifpo_pct);
  const haveStuck = rows.length > 0 && rows.every((r) => r.stuckat_pct !== null);
  const stuck = haveStuck ? rows.map((r) => r.stuckat_pct as number) : null;
  const flat: number[] = [];
  for (let i = 1; i < rows.length; i++) {
    const gFlat = gif[i] === gif[i - 1];
    const sFlat = stuck === null || stuck[i] === stuck[i - 1];
    if (gFlat && sFlat) flat.push(cycles[i]!);
  }
  return { cycles, gif, stuck, flat };
}

/** Round-trip guard used by tests: a row re-serializes to its source record. */
export function rowToPayload(row: TableRow): PointView {
  return row.point;
}
