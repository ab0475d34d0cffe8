/**
 * Dependency-free SVG line chart for the two coverage curves.
 *
 * Renders one polyline per curve on a 0..100 percent axis, tick marks, a
 * hover readout of (cycle, values), and dots on the cycles flagged as flat
 * in both curves (candidates for removal during compaction).
 */

import { CurveModel } from "./viewmodel";

const W = 720;
const H = 280;
const PAD = 36;

function sx(model: CurveModel, cycle: number): number {
  const span = Math.max(1, model.cycles.length - 1);
  const i = model.cycles.indexOf(cycle);
  return PAD + ((W - 2 * PAD) * (i < 0 ? 0 : i)) / span;
}

function sy(pct: number): number {
  return H - PAD - ((H - 2 * PAD) * pct) / 100;
}

export function polyline(model: CurveModel, values: number[]): string {
  return values
    .map((v, i) => `${sx(model, model.cycles[i]!).toFixed(1)},${sy(v).toFixed(1)}`)
    .join(" ");
}

export function renderChart(root: HTMLElement, model: CurveModel): void {
  root.innerHTML = "";
  if (!model.cycles.length) {
    root.textContent = "no curve data";
    return;
  }
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.setAttribute("class", "curve-chart");

  for (const pct of [0, 25, 50, 75, 100]) {
    const line = document.createElementNS(svg.namespaceURI, "line");
    line.setAttribute("x1", String(PAD));
    line.setAttribute("x2", String(W - PAD));
    line.setAttribute("y1", String(sy(pct)));
    line.setAttribute("y2", String(sy(pct)));
    line.setAttribute("class", "grid");
    svg.appendChild(line);
    const label = document.createElementNS(svg.namespaceURI, "text");
    label.setAttribute("x", "2");
    label.setAttribute("y", String(sy(pct) + 4));
    label.setAttribute("class", "tick");
    label.textContent = `${pct}%`;
    svg.appendChild(label);
  }

  const series: Array<[string, number[]]> = [["gifpo", model.gif]];
  if (model.stuck) series.push(["stuckat", model.stuck]);
  for (const [name, values] of series) {
    const pl = document.createElementNS(svg.namespaceURI, "polyline");
    pl.setAttribute("points", polyline(model, values));
    pl.setAttribute("class", `line-${name}`);
    pl.setAttribute("fill", "none");
    svg.appendChild(pl);
  }

  for (const cycle of model.flat) {
    const i = model.cycles.indexOf(cycle);
    const dot = document.createElementNS(svg.namespaceURI, "circle");
    dot.setAttribute("cx", String(sx(model, cycle)));
    dot.setAttribute("cy", String(sy(model.gif[i]!)));
    dot.setAttribute("r", "2");
    dot.setAttribute("class", "flat-marker");
    svg.appendChild(dot);
  }

  const readout = document.createElement("div");
  readout.className = "hover-readout";
  readout.textContent = hoverText(model, model.cycles.length - 1);
  svg.addEventListener("mousemove", (ev: MouseEvent) => {
    const rect = (svg as unknown as SVGGraphicsElement).getBoundingClientRect();
    const frac = (ev.clientX - rect.left) / Math.max(1, rect.width);
    const i = Math.min(model.cycles.length - 1,
      Math.max(0, Math.round(frac * (model.cycles.length - 1))));
    readout.textContent = hoverText(model, i);
  });
  root.appendChild(svg);
  root.appendChild(readout);
}

export function hoverText(model: CurveModel, i: number): string {
  const parts = [`cycle ${model.cycles[i]}`, `gifpo ${model.gif[i]}%`];
  if (model.stuck) parts.push(`stuckat ${model.stuck[i]}%`);
  if (model.flat.includes(model.cycles[i]!)) parts.push("(flat: compaction candidate)");
  return parts.join("  ");
}
