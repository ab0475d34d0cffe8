/**
 * Payload shapes of the workbench HTTP API (api_version 1).
 *
 * The UI derives all of its state from these responses; the view model
 * passes the fields through unmapped so a page shows exactly what the API
 * returned.
 */

export interface Summary {
  api_version: number;
  circuit: string;
  total: number;
  unreachable: number;
  open: number;
  covered: number;
  percent: number;
  cycles: number;
}

export type PointStatus = "open" | "covered" | "unreachable-auto" | "unreachable-fpd";

/** One coverage point as served by /api/points (mirrors the payload exactly). */
export interface PointView {
  index: number;
  gate: string;
  out: string;
  m: string;
  po: string;
  kind: string;
  members: string[];
  member_pins: string[];
  alpha: number;
  src: string;
  line: number;
  status: PointStatus;
  first_cycle: number | null;
  po_alpha: number | null;
}

export interface PointsPage {
  total_matched: number;
  page: number;
  page_size: number;
  items: PointView[];
}

export interface CurveRow {
  cycle: number;
  gifpo_pct: number;
  stuckat_pct: number | null;
}

export interface CurvePayload {
  source: "report" | "coverage" | "none";
  rows: CurveRow[];
}

export interface FpdRequest {
  gate: string;
  out: string;
  m: string;
  po: string;
  reason: string;
  author: string;
}

export function isSummary(x: unknown): x is Summary {
  const s = x as Summary;
  return !!s && typeof s.total === "number" && typeof s.covered === "number"
    && typeof s.open === "number" && typeof s.percent === "number";
}

export function isPointsPage(x: unknown): x is PointsPage {
  const p = x as PointsPage;
  return !!p && Array.isArray(p.items) && typeof p.total_matched === "number";
}

export function isCurvePayload(x: unknown): x is CurvePayload {
  const c = x as CurvePayload;
  return !!c && Array.isArray(c.rows);
}
