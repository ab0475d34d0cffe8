/**
 * Table behaviour in a DOM: selection limited to open points, one POST per
 * selected point, conflict badges on raced rows, denominator refresh.
 */

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { Client } from "../src/api";
import { PointTable } from "../src/table";
import { PointsPage, PointView, Summary } from "../src/types";
import mul8Points from "./fixtures/mul8_points.json";
import mul8Open from "./fixtures/mul8_points_open.json";
import mul8Summary from "./fixtures/mul8_summary.json";

const basePoints = mul8Points as PointsPage;
const baseSummary = mul8Summary as Summary;

function pageOf(items: PointView[]): PointsPage {
  return { total_matched: items.length, page: 0, page_size: 50, items };
}

let fpdBodies: unknown[] = [];
let fpdResponses: Array<[number, unknown]> = [];
let served: PointsPage;

beforeEach(() => {
  document.body.innerHTML = '<div id="points"></div>';
  fpdBodies = [];
  // a real mix: three covered points and three open ones
  served = pageOf([...basePoints.items.slice(0, 3),
                   ...(mul8Open as PointsPage).items.slice(0, 3)]);
  vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
    if (url.startsWith("/api/points")) {
      return json(200, served);
    }
    if (url === "/api/fpd") {
      fpdBodies.push(JSON.parse(String(init?.body)));
      const [status, body] = fpdResponses.shift() ?? [
        200, { applied: [], summary: { ...baseSummary, unreachable: baseSummary.unreachable + 1 } }];
      return json(status, body);
    }
    throw new Error(`unexpected ${url}`);
  });
});

afterEach(() => {
  vi.unstubAllGlobals();
});

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status, headers: { "content-type": "application/json" } });
}

function openIndexes(): number[] {
  return served.items.filter((p) => p.status === "open").map((p) => p.index);
}

describe("point table", () => {
  it("renders one row per payload item with checkboxes only on open points", async () => {
    const table = new PointTable(new Client(), document.getElementById("points")!);
    await table.refresh();
    const rows = document.querySelectorAll("table.points tr[data-index]");
    expect(rows.length).toBe(served.items.length);
    const boxes = document.querySelectorAll("input[type=checkbox]");
    expect(boxes.length).toBe(openIndexes().length);
  });

  it("empty selection is a no-op", async () => {
    const table = new PointTable(new Client(), document.getElementById("points")!);
    await table.refresh();
    await table.annotateSelected();
    expect(fpdBodies.length).toBe(0);
  });

  it("posts one exact entry per selected open point and refreshes the summary", async () => {
    const table = new PointTable(new Client(), document.getElementById("points")!);
    const seen: Summary[] = [];
    table.onSummary = (s) => seen.push(s);
    await table.refresh();
    const picks = openIndexes().slice(0, 2);
    for (const idx of picks) table.state.selected.add(idx);
    await table.annotateSelected("because", "tester");
    expect(fpdBodies.length).toBe(2);
    for (const [k, idx] of picks.entries()) {
      const p = served.items.find((q) => q.index === idx)!;
      expect(fpdBodies[k]).toEqual({
        gate: p.gate, out: p.out, m: p.m, po: p.po,
        reason: "because", author: "tester",
      });
    }
    expect(seen.length).toBe(1);
    expect(seen[0]!.unreachable).toBe(baseSummary.unreachable + 1);
  });

  it("keeps going past a raced covered point and badges the row", async () => {
    const table = new PointTable(new Client(), document.getElementById("points")!);
    await table.refresh();
    const picks = openIndexes().slice(0, 2);
    for (const idx of picks) table.state.selected.add(idx);
    fpdResponses = [
      [409, { detail: "covered point cannot be a false path" }],
      [200, { applied: [], summary: baseSummary }],
    ];
    await table.annotateSelected();
    expect(fpdBodies.length).toBe(2);
    expect(table.state.rowErrors.get(picks[0]!)).toContain("409");
    const badge = document.querySelector(".row-error");
    expect(badge?.textContent).toContain("covered point");
  });
});
