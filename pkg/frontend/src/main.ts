/**
 * Single-page workbench UI: an overview page (summary plus filterable point
 * table with the mark-unreachable action) and a curve page (the two
 * cumulative coverage lines).  All state comes from the API; reloading the
 * page reproduces the views exactly.
 */

import { Client } from "./api";
import { renderChart } from "./chart";
import { PointTable } from "./table";
import { Summary } from "./types";
import { overviewHeadline, toCurveModel } from "./viewmodel";

const client = new Client();

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

export function renderSummary(target: HTMLElement, s: Summary): void {
  target.innerHTML = "";
  const h = document.createElement("h2");
  h.id = "headline";
  h.textContent = `${s.circuit}: ${overviewHeadline(s)}`;
  const detail = document.createElement("p");
  detail.id = "summary-detail";
  detail.textContent =
    `${s.total} points, ${s.unreachable} unreachable, ${s.open} open, ` +
    `${s.covered} covered over ${s.cycles} cycles`;
  target.appendChild(h);
  target.appendChild(detail);
}

async function showOverview(): Promise<void> {
  el("page-curve").hidden = true;
  el("page-overview").hidden = false;
  const summary = await client.summary();
  renderSummary(el("summary"), summary);
  const table = new PointTable(client, el("points"));
  table.onSummary = (s) => renderSummary(el("summary"), s);
  await table.refresh();
}

async function showCurve(): Promise<void> {
  el("page-overview").hidden = true;
  el("page-curve").hidden = false;
  try {
    const payload = await client.curve();
    renderChart(el("chart"), toCurveModel(payload.rows));
    el("curve-source").textContent = payload.source === "report"
      ? "paired gate-level correlation from the latest report run"
      : payload.source === "coverage"
        ? "coverage curve only (no gate-level data yet)"
        : "no runs yet";
  } catch (e) {
    el("chart").textContent = "curve unavailable";
    throw e;
  }
}

async function route(): Promise<void> {
  const banner = el("error-banner");
  banner.hidden = true;
  try {
    if (location.hash === "#/curve") {
      await showCurve();
    } else {
      await showOverview();
    }
  } catch (e) {
    banner.hidden = false;
    banner.textContent = `workbench API unreachable or failing: ${String(e)}`;
  }
}

export function install(): void {
  window.addEventListener("hashchange", () => void route());
  void route();
}

if (typeof document !== "undefined" && document.getElementById("page-overview")) {
  install();
}
